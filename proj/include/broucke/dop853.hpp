#pragma once

// Adaptive eighth-order Dormand-Prince integrator (Hairer & Wanner's DOP853)
// with the 5(3) combined error estimator and seventh-order dense output.
// Fixed-size Eigen states; the right-hand side is a callable
//   void f(double s, const State& y, State& dy)

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace broucke {

class StepFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double rtol = 1e-12;
    double atol = 1e-12;
    double min_step = 1e-14;
    double max_step = 0.0;  // 0: unbounded (span length)
    long max_steps = 5'000'000;
};

struct IntegrationStats {
    long accepted = 0;
    long rejected = 0;
    long evaluations = 0;
};

namespace dop853 {

template <int N>
using State = Eigen::Matrix<double, N, 1>;

/// One accepted step [s_begin, s_begin + h] with its interpolation
/// coefficients (valid only when has_dense is set).
template <int N>
struct DenseStep {
    double s_begin = 0.0;
    double h = 0.0;
    State<N> y_begin;
    State<N> y_end;
    std::array<State<N>, 8> rc;
    bool has_dense = false;

    State<N> eval(double s) const {
        const double th = (s - s_begin) / h;
        const double th1 = 1.0 - th;
        return rc[0] + th * (rc[1] + th1 * (rc[2] + th * (rc[3] + th1 * (rc[4] + th * (rc[5] + th1 * (rc[6] + th * rc[7]))))));
    }
};

namespace coef {
inline constexpr double c2 = 0.526001519587677318785587544488E-01, c3 = 0.789002279381515978178381316732E-01,
    c4 = 0.118350341907227396726757197510E+00, c5 = 0.281649658092772603273242802490E+00,
    c6 = 0.333333333333333333333333333333E+00, c7 = 0.25E+00, c8 = 0.307692307692307692307692307692E+00,
    c9 = 0.651282051282051282051282051282E+00, c10 = 0.6E+00, c11 = 0.857142857142857142857142857142E+00,
    c14 = 0.1E+00, c15 = 0.2E+00, c16 = 0.777777777777777777777777777778E+00;

inline constexpr double b1 = 5.42937341165687622380535766363E-2, b6 = 4.45031289275240888144113950566E0,
    b7 = 1.89151789931450038304281599044E0, b8 = -5.8012039600105847814672114227E0,
    b9 = 3.1116436695781989440891606237E-1, b10 = -1.52160949662516078556178806805E-1,
    b11 = 2.01365400804030348374776537501E-1, b12 = 4.47106157277725905176885569043E-2;

inline constexpr double bhh1 = 0.244094488188976377952755905512E+00, bhh2 = 0.733846688281611857341361741547E+00,
    bhh3 = 0.220588235294117647058823529412E-01;

inline constexpr double er1 = 0.1312004499419488073250102996E-01, er6 = -0.1225156446376204440720569753E+01,
    er7 = -0.4957589496572501915214079952E+00, er8 = 0.1664377182454986536961530415E+01,
    er9 = -0.3503288487499736816886487290E+00, er10 = 0.3341791187130174790297318841E+00,
    er11 = 0.8192320648511571246570742613E-01, er12 = -0.2235530786388629525884427845E-01;

inline constexpr double a21 = 5.26001519587677318785587544488E-2, a31 = 1.97250569845378994544595329183E-2,
    a32 = 5.91751709536136983633785987549E-2, a41 = 2.95875854768068491816892993775E-2,
    a43 = 8.87627564304205475450678981324E-2, a51 = 2.41365134159266685502369798665E-1,
    a53 = -8.84549479328286085344864962717E-1, a54 = 9.24834003261792003115737966543E-1,
    a61 = 3.7037037037037037037037037037E-2, a64 = 1.70828608729473871279604482173E-1,
    a65 = 1.25467687566822425016691814123E-1, a71 = 3.7109375E-2, a74 = 1.70252211019544039314978060272E-1,
    a75 = 6.02165389804559606850219397283E-2, a76 = -1.7578125E-2, a81 = 3.70920001185047927108779319836E-2,
    a84 = 1.70383925712239993810214054705E-1, a85 = 1.07262030446373284651809199168E-1,
    a86 = -1.53194377486244017527936158236E-2, a87 = 8.27378916381402288758473766002E-3,
    a91 = 6.24110958716075717114429577812E-1, a94 = -3.36089262944694129406857109825E0,
    a95 = -8.68219346841726006818189891453E-1, a96 = 2.75920996994467083049415600797E1,
    a97 = 2.01540675504778934086186788979E1, a98 = -4.34898841810699588477366255144E1,
    a101 = 4.77662536438264365890433908527E-1, a104 = -2.48811461997166764192642586468E0,
    a105 = -5.90290826836842996371446475743E-1, a106 = 2.12300514481811942347288949897E1,
    a107 = 1.52792336328824235832596922938E1, a108 = -3.32882109689848629194453265587E1,
    a109 = -2.03312017085086261358222928593E-2, a111 = -9.3714243008598732571704021658E-1,
    a114 = 5.18637242884406370830023853209E0, a115 = 1.09143734899672957818500254654E0,
    a116 = -8.14978701074692612513997267357E0, a117 = -1.85200656599969598641566180701E1,
    a118 = 2.27394870993505042818970056734E1, a119 = 2.49360555267965238987089396762E0,
    a1110 = -3.0467644718982195003823669022E0, a121 = 2.27331014751653820792359768449E0,
    a124 = -1.05344954667372501984066689879E1, a125 = -2.00087205822486249909675718444E0,
    a126 = -1.79589318631187989172765950534E1, a127 = 2.79488845294199600508499808837E1,
    a128 = -2.85899827713502369474065508674E0, a129 = -8.87285693353062954433549289258E0,
    a1210 = 1.23605671757943030647266201528E1, a1211 = 6.43392746015763530355970484046E-1;

inline constexpr double a141 = 5.61675022830479523392909219681E-2, a147 = 2.53500210216624811088794765333E-1,
    a148 = -2.46239037470802489917441475441E-1, a149 = -1.24191423263816360469010140626E-1,
    a1410 = 1.5329179827876569731206322685E-1, a1411 = 8.20105229563468988491666602057E-3,
    a1412 = 7.56789766054569976138603589584E-3, a1413 = -8.298E-3;
inline constexpr double a151 = 3.18346481635021405060768473261E-2, a156 = 2.83009096723667755288322961402E-2,
    a157 = 5.35419883074385676223797384372E-2, a158 = -5.49237485713909884646569340306E-2,
    a1511 = -1.08347328697249322858509316994E-4, a1512 = 3.82571090835658412954920192323E-4,
    a1513 = -3.40465008687404560802977114492E-4, a1514 = 1.41312443674632500278074618366E-1;
inline constexpr double a161 = -4.28896301583791923408573538692E-1, a166 = -4.69762141536116384314449447206E0,
    a167 = 7.68342119606259904184240953878E0, a168 = 4.06898981839711007970213554331E0,
    a169 = 3.56727187455281109270669543021E-1, a1613 = -1.39902416515901462129418009734E-3,
    a1614 = 2.9475147891527723389556272149E0, a1615 = -9.15095847217987001081870187138E0;

inline constexpr double d41 = -0.84289382761090128651353491142E+01, d46 = 0.56671495351937776962531783590E+00,
    d47 = -0.30689499459498916912797304727E+01, d48 = 0.23846676565120698287728149680E+01,
    d49 = 0.21170345824450282767155149946E+01, d410 = -0.87139158377797299206789907490E+00,
    d411 = 0.22404374302607882758541771650E+01, d412 = 0.63157877876946881815570249290E+00,
    d413 = -0.88990336451333310820698117400E-01, d414 = 0.18148505520854727256656404962E+02,
    d415 = -0.91946323924783554000451984436E+01, d416 = -0.44360363875948939664310572000E+01;
inline constexpr double d51 = 0.10427508642579134603413151009E+02, d56 = 0.24228349177525818288430175319E+03,
    d57 = 0.16520045171727028198505394887E+03, d58 = -0.37454675472269020279518312152E+03,
    d59 = -0.22113666853125306036270938578E+02, d510 = 0.77334326684722638389603898808E+01,
    d511 = -0.30674084731089398182061213626E+02, d512 = -0.93321305264302278729567221706E+01,
    d513 = 0.15697238121770843886131091075E+02, d514 = -0.31139403219565177677282850411E+02,
    d515 = -0.93529243588444783865713862664E+01, d516 = 0.35816841486394083752465898540E+02;
inline constexpr double d61 = 0.19985053242002433820987653617E+02, d66 = -0.38703730874935176555105901742E+03,
    d67 = -0.18917813819516756882830838328E+03, d68 = 0.52780815920542364900561016686E+03,
    d69 = -0.11573902539959630126141871134E+02, d610 = 0.68812326946963000169666922661E+01,
    d611 = -0.10006050966910838403183860980E+01, d612 = 0.77771377980534432092869265740E+00,
    d613 = -0.27782057523535084065932004339E+01, d614 = -0.60196695231264120758267380846E+02,
    d615 = 0.84320405506677161018159903784E+02, d616 = 0.11992291136182789328035130030E+02;
inline constexpr double d71 = -0.25693933462703749003312586129E+02, d76 = -0.15418974869023643374053993627E+03,
    d77 = -0.23152937917604549567536039109E+03, d78 = 0.35763911791061412378285349910E+03,
    d79 = 0.93405324183624310003907691704E+02, d710 = -0.37458323136451633156875139351E+02,
    d711 = 0.10409964950896230045147246184E+03, d712 = 0.29840293426660503123344363579E+02,
    d713 = -0.43533456590011143754432175058E+02, d714 = 0.96324553959188282948394950600E+02,
    d715 = -0.39177261675615439165231486172E+02, d716 = -0.14972683625798562581422125276E+03;
}  // namespace coef

/// Stage storage for one DOP853 step.
template <int N>
struct Stages {
    State<N> k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, y1, tmp;
};

/// Computes the twelve stages starting from k1 = f(s, y). On return y1 holds
/// the eighth-order solution at s + h and k4 holds the weighted increment.
template <int N, class F>
void step12(F& f, double s, const State<N>& y, double h, Stages<N>& st) {
    using namespace coef;
    auto& [k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, y1, tmp] = st;
    tmp = y + h * a21 * k1;
    f(s + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    f(s + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a43 * k3);
    f(s + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a53 * k3 + a54 * k4);
    f(s + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a64 * k4 + a65 * k5);
    f(s + c6 * h, tmp, k6);
    tmp = y + h * (a71 * k1 + a74 * k4 + a75 * k5 + a76 * k6);
    f(s + c7 * h, tmp, k7);
    tmp = y + h * (a81 * k1 + a84 * k4 + a85 * k5 + a86 * k6 + a87 * k7);
    f(s + c8 * h, tmp, k8);
    tmp = y + h * (a91 * k1 + a94 * k4 + a95 * k5 + a96 * k6 + a97 * k7 + a98 * k8);
    f(s + c9 * h, tmp, k9);
    tmp = y + h * (a101 * k1 + a104 * k4 + a105 * k5 + a106 * k6 + a107 * k7 + a108 * k8 + a109 * k9);
    f(s + c10 * h, tmp, k10);
    tmp = y + h * (a111 * k1 + a114 * k4 + a115 * k5 + a116 * k6 + a117 * k7 + a118 * k8 + a119 * k9 +
                   a1110 * k10);
    f(s + c11 * h, tmp, k2);
    tmp = y + h * (a121 * k1 + a124 * k4 + a125 * k5 + a126 * k6 + a127 * k7 + a128 * k8 + a129 * k9 +
                   a1210 * k10 + a1211 * k2);
    f(s + h, tmp, k3);
    k4 = b1 * k1 + b6 * k6 + b7 * k7 + b8 * k8 + b9 * k9 + b10 * k10 + b11 * k2 + b12 * k3;
    y1 = y + h * k4;
}

/// Single eighth-order step of size h, no error control.
template <int N, class F>
State<N> single_step(F&& f, double s, const State<N>& y, double h) {
    Stages<N> st;
    f(s, y, st.k1);
    step12<N>(f, s, y, h, st);
    return st.y1;
}

template <int N>
double error_norm(const State<N>& y, const Stages<N>& st, double h, const Tolerances& tol) {
    using namespace coef;
    double err = 0.0, err2 = 0.0;
    for (int i = 0; i < N; ++i) {
        const double sk = tol.atol + tol.rtol * std::max(std::abs(y[i]), std::abs(st.y1[i]));
        double e2 = (st.k4[i] - bhh1 * st.k1[i] - bhh2 * st.k9[i] - bhh3 * st.k3[i]) / sk;
        err2 += e2 * e2;
        double e = (er1 * st.k1[i] + er6 * st.k6[i] + er7 * st.k7[i] + er8 * st.k8[i] + er9 * st.k9[i] +
                    er10 * st.k10[i] + er11 * st.k2[i] + er12 * st.k3[i]) / sk;
        err += e * e;
    }
    double deno = err + 0.01 * err2;
    if (deno <= 0.0) deno = 1.0;
    return std::abs(h) * err * std::sqrt(1.0 / (deno * N));
}

/// Fills the dense-output coefficients of an accepted step. `k_end` must be
/// f(s + h, y1). Uses three extra evaluations.
template <int N, class F>
void dense_coefficients(F& f, double s, const State<N>& y, double h, Stages<N>& st, const State<N>& k_end,
                        DenseStep<N>& out) {
    using namespace coef;
    auto& [k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, y1, tmp] = st;
    auto& rc = out.rc;
    const State<N> ydiff = y1 - y;
    const State<N> bspl = h * k1 - ydiff;
    rc[0] = y;
    rc[1] = ydiff;
    rc[2] = bspl;
    rc[3] = ydiff - h * k_end - bspl;
    rc[4] = d41 * k1 + d46 * k6 + d47 * k7 + d48 * k8 + d49 * k9 + d410 * k10 + d411 * k2 + d412 * k3;
    rc[5] = d51 * k1 + d56 * k6 + d57 * k7 + d58 * k8 + d59 * k9 + d510 * k10 + d511 * k2 + d512 * k3;
    rc[6] = d61 * k1 + d66 * k6 + d67 * k7 + d68 * k8 + d69 * k9 + d610 * k10 + d611 * k2 + d612 * k3;
    rc[7] = d71 * k1 + d76 * k6 + d77 * k7 + d78 * k8 + d79 * k9 + d710 * k10 + d711 * k2 + d712 * k3;

    // k4 is the increment slot at this point; the extra stages use k_end.
    State<N> e14, e15, e16;
    tmp = y + h * (a141 * k1 + a147 * k7 + a148 * k8 + a149 * k9 + a1410 * k10 + a1411 * k2 + a1412 * k3 +
                   a1413 * k_end);
    f(s + c14 * h, tmp, e14);
    tmp = y + h * (a151 * k1 + a156 * k6 + a157 * k7 + a158 * k8 + a1511 * k2 + a1512 * k3 + a1513 * k_end +
                   a1514 * e14);
    f(s + c15 * h, tmp, e15);
    tmp = y + h * (a161 * k1 + a166 * k6 + a167 * k7 + a168 * k8 + a169 * k9 + a1613 * k_end + a1614 * e14 +
                   a1615 * e15);
    f(s + c16 * h, tmp, e16);

    rc[4] = h * (rc[4] + d413 * k_end + d414 * e14 + d415 * e15 + d416 * e16);
    rc[5] = h * (rc[5] + d513 * k_end + d514 * e14 + d515 * e15 + d516 * e16);
    rc[6] = h * (rc[6] + d613 * k_end + d614 * e14 + d615 * e15 + d616 * e16);
    rc[7] = h * (rc[7] + d713 * k_end + d714 * e14 + d715 * e15 + d716 * e16);
    out.has_dense = true;
}

template <int N, class F>
double initial_step(F& f, double s, const State<N>& y, const State<N>& f0, double hmax, double dir,
                    const Tolerances& tol) {
    double dnf = 0.0, dny = 0.0;
    for (int i = 0; i < N; ++i) {
        const double sk = tol.atol + tol.rtol * std::abs(y[i]);
        dnf += (f0[i] / sk) * (f0[i] / sk);
        dny += (y[i] / sk) * (y[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, hmax) * dir;
    State<N> y1 = y + h * f0, f1;
    f(s + h, y1, f1);
    double der2 = 0.0;
    for (int i = 0; i < N; ++i) {
        const double q = (f1[i] - f0[i]) / (tol.atol + tol.rtol * std::abs(y[i]));
        der2 += q * q;
    }
    der2 = std::sqrt(der2) / std::abs(h);
    const double der12 = std::max(der2, std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
    return std::min({100.0 * std::abs(h), h1, hmax}) * dir;
}

/// Integrates y' = f(s, y) from s0 to s1 (either direction). `on_step` is
/// called with every accepted step and returns false to stop early.
template <int N, class F, class Observer>
IntegrationStats integrate(F&& f, double s0, const State<N>& y0, double s1, const Tolerances& tol, bool dense,
                           Observer&& on_step) {
    IntegrationStats stats;
    if (s1 == s0) return stats;
    auto counted = [&](double s, const State<N>& y, State<N>& dy) {
        ++stats.evaluations;
        f(s, y, dy);
    };

    const double dir = s1 > s0 ? 1.0 : -1.0;
    double hmax = std::abs(s1 - s0);
    if (tol.max_step > 0.0) hmax = std::min(hmax, tol.max_step);

    constexpr double safe = 0.9, fac1 = 1.0 / 3.0, fac2 = 6.0, expo = 1.0 / 8.0;
    Stages<N> st;
    State<N> y = y0;
    double s = s0;
    counted(s, y, st.k1);
    double h = initial_step<N>(counted, s, y, st.k1, hmax, dir, tol);
    bool reject = false, last = false;
    DenseStep<N> step;
    State<N> k_end;

    while (true) {
        if (stats.accepted + stats.rejected > tol.max_steps) throw StepFailure("step limit exceeded");
        if (std::abs(h) < tol.min_step) {
            std::ostringstream os;
            os << "step size collapsed to " << std::abs(h) << " at s = " << s;
            throw StepFailure(os.str());
        }
        if ((s + 1.01 * h - s1) * dir > 0.0) {
            h = s1 - s;
            last = true;
        }
        step12<N>(counted, s, y, h, st);
        const double err = error_norm<N>(y, st, h, tol);
        if (!std::isfinite(err)) {
            // Non-finite stage values: shrink hard and retry.
            h *= 0.1;
            reject = true;
            last = false;
            ++stats.rejected;
            continue;
        }
        const double fac11 = std::pow(err, expo);
        const double fac = std::max(1.0 / fac2, std::min(1.0 / fac1, fac11 / safe));
        double hnew = h / fac;

        if (err <= 1.0) {
            ++stats.accepted;
            counted(s + h, st.y1, k_end);
            step.s_begin = s;
            step.h = h;
            step.y_begin = y;
            step.y_end = st.y1;
            step.has_dense = false;
            if (dense) dense_coefficients<N>(counted, s, y, h, st, k_end, step);

            y = st.y1;
            st.k1 = k_end;
            s = last ? s1 : s + h;
            if (!on_step(step)) return stats;
            if (last) return stats;

            if (std::abs(hnew) > hmax) hnew = dir * hmax;
            if (reject) hnew = dir * std::min(std::abs(hnew), std::abs(h));
            reject = false;
        } else {
            hnew = h / std::min(1.0 / fac1, fac11 / safe);
            reject = true;
            last = false;
            ++stats.rejected;
        }
        h = hnew;
    }
}

}  // namespace dop853
}  // namespace broucke
