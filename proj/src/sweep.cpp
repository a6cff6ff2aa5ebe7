#include "broucke/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "broucke/plot.hpp"

namespace broucke {

const char* const kCsvHeader =
    "m1,m2,zeta4,s0,t_period,k11,a,b,c,d,e,eig2,res_left_eig,res_sparsity,res_symplectic,gamma_drift,a2_drift,"
    "stable_2df,spectral_4df,linear_4df,degenerate_cause,status";

void SweepConfig::validate() const {
    if (!(m1_min > 0.0 && m1_min <= m1_max && m1_max < 1.5))
        throw std::invalid_argument("sweep: need 0 < m1_min <= m1_max < 1.5");
    if (!(step > 0.0)) throw std::invalid_argument("sweep: step must be positive");
    if (!(tol > 0.0) || !(delta > 0.0)) throw std::invalid_argument("sweep: tol and delta must be positive");
}

std::vector<double> SweepConfig::grid() const {
    validate();
    const auto n = static_cast<std::size_t>(std::floor((m1_max - m1_min) / step + 1e-9)) + 1;
    std::vector<double> g(n);
    // Snap to 12 decimals so 0.005 * k lands on the nearest double to the decimal.
    for (std::size_t k = 0; k < n; ++k) g[k] = std::round((m1_min + static_cast<double>(k) * step) * 1e12) / 1e12;
    return g;
}

std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv("BROUCKE_OUT_DIR"); env && *env) return env;
    return "broucke_out";
}

namespace {

StabilityRecord failed_record(double m1, const std::string& status) {
    StabilityRecord rec;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.m1 = m1;
    rec.m2 = 3.0 - 2.0 * m1;
    rec.zeta4 = rec.s0 = rec.t_period = nan;
    rec.k11 = rec.a = rec.b = rec.c = rec.d = rec.e = rec.eig2 = rec.eig2_det = nan;
    rec.res_left_eig = rec.res_sparsity = rec.res_symplectic = rec.res_first_column = rec.res_leakage = nan;
    rec.gamma_drift = rec.a2_drift = nan;
    rec.reliable = false;
    rec.status = status;
    return rec;
}

// Linear extrapolation from the last two solved points on the walk.
struct Continuation {
    std::vector<std::pair<double, double>> history;  // (m1, zeta4)

    std::optional<double> guess(double m1) const {
        if (history.empty()) return std::nullopt;
        const auto [mb, zb] = history.back();
        if (history.size() == 1) return zb;
        const auto [ma, za] = history[history.size() - 2];
        const double g = zb + (zb - za) * (m1 - mb) / (mb - ma);
        return g > 0.0 ? g : zb;
    }
    void add(double m1, double zeta4) { history.emplace_back(m1, zeta4); }
};

bool same_mass(double x, double y) { return std::abs(x - y) <= 1e-12; }

}  // namespace

std::vector<StabilityRecord> run_sweep(const SweepConfig& cfg, const std::vector<StabilityRecord>& previous) {
    const std::vector<double> grid = cfg.grid();
    const std::size_t n = grid.size();
    std::vector<std::optional<StabilityRecord>> records(n);
    std::vector<std::optional<OrbitSolution>> orbits(n);

    for (std::size_t i = 0; i < n; ++i)
        for (const auto& p : previous)
            if (p.ok() && same_mass(p.m1, grid[i])) records[i] = p;

    OrbitOptions oo;
    oo.tol = cfg.tol;
    oo.m1_limit = cfg.m1_limit;

    // Sequential continuation pre-pass: outward from the grid point nearest 0.5.
    std::size_t centre = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(grid[i] - 0.5) < std::abs(grid[centre] - 0.5)) centre = i;

    auto solve_at = [&](std::size_t i, Continuation& cont) {
        if (records[i]) {
            cont.add(grid[i], records[i]->zeta4);
            return;
        }
        try {
            const MassParams params(grid[i], cfg.energy);
            orbits[i] = find_orbit(params, cont.guess(grid[i]), oo);
            cont.add(grid[i], orbits[i]->zeta4);
        } catch (const OrbitSolveError& e) {
            records[i] = failed_record(grid[i], to_string(e.cause()));
        } catch (const std::exception&) {
            records[i] = failed_record(grid[i], "integration_failure");
        }
    };
    Continuation up, down;
    for (std::size_t i = centre; i < n; ++i) solve_at(i, up);
    if (!up.history.empty() && up.history.front().first == grid[centre]) down.add(grid[centre], up.history.front().second);
    for (std::size_t i = centre; i-- > 0;) solve_at(i, down);

    // Frame integration and classification are independent per mass.
    ClassifyOptions co;
    co.delta = cfg.delta;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            if (records[i] || !orbits[i]) continue;
            try {
                const MonodromyData md = monodromy_data(*orbits[i], cfg.tol);
                records[i] = classify(md, *orbits[i], co);
            } catch (const std::exception&) {
                records[i] = failed_record(grid[i], "integration_failure");
            }
        }
    };
    unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    std::vector<StabilityRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(records[i] ? *records[i] : failed_record(grid[i], "missing"));
    return out;
}

std::string csv_row(const StabilityRecord& r) {
    std::string row;
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        row += buf;
        row += ',';
    };
    for (double v : {r.m1, r.m2, r.zeta4, r.s0, r.t_period, r.k11, r.a, r.b, r.c, r.d, r.e, r.eig2, r.res_left_eig,
                     r.res_sparsity, r.res_symplectic, r.gamma_drift, r.a2_drift})
        put(v);
    for (bool b : {r.stable_2df, r.spectral_4df, r.linear_4df}) row += b ? "1," : "0,";
    row += to_string(r.degenerate);
    row += ',';
    row += r.status;
    return row;
}

void write_csv(const std::filesystem::path& path, const std::vector<StabilityRecord>& records) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << kCsvHeader << '\n';
    for (const auto& r : records) f << csv_row(r) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

Degeneracy degeneracy_from_string(const std::string& s) {
    for (Degeneracy d : {Degeneracy::None, Degeneracy::Crossing, Degeneracy::UnitEigenvalue,
                         Degeneracy::ZeroEigenvalue, Degeneracy::DoubledAngle, Degeneracy::Boundary,
                         Degeneracy::Unreliable})
        if (s == to_string(d)) return d;
    throw std::invalid_argument("unknown degeneracy cause '" + s + "'");
}

std::vector<StabilityRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    if (!std::getline(f, line) || line != kCsvHeader) throw std::runtime_error(path.string() + ": unexpected header");
    std::vector<StabilityRecord> out;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() != 22)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 22 fields");
        StabilityRecord r;
        double* nums[] = {&r.m1, &r.m2, &r.zeta4, &r.s0, &r.t_period, &r.k11, &r.a, &r.b, &r.c,
                          &r.d, &r.e, &r.eig2, &r.res_left_eig, &r.res_sparsity, &r.res_symplectic,
                          &r.gamma_drift, &r.a2_drift};
        for (std::size_t k = 0; k < 17; ++k) *nums[k] = std::strtod(cells[k].c_str(), nullptr);
        r.stable_2df = cells[17] == "1";
        r.spectral_4df = cells[18] == "1";
        r.linear_4df = cells[19] == "1";
        r.degenerate = degeneracy_from_string(cells[20]);
        r.status = cells[21];
        r.eig2_det = std::numeric_limits<double>::quiet_NaN();
        r.reliable = r.ok() && r.degenerate != Degeneracy::Unreliable;
        out.push_back(r);
    }
    return out;
}

void write_plots(const std::vector<StabilityRecord>& records, const std::filesystem::path& dir, bool svg) {
    std::filesystem::create_directories(dir);
    std::vector<double> m;
    std::vector<double> zeta4, k11, e, eig2;
    for (const auto& r : records) {
        if (!r.ok()) continue;
        m.push_back(r.m1);
        zeta4.push_back(r.zeta4);
        k11.push_back(r.k11);
        e.push_back(r.e);
        eig2.push_back(r.eig2);
    }
    const std::vector<std::pair<std::string, plot::Figure>> figures = {
        {"zeta4", {"Initial condition Q4(0) of the periodic orbit", "m1", "zeta4", {{"zeta4", m, zeta4}}}},
        {"k11", {"Structural eigenvalue k11", "m1", "k11", {{"k11", m, k11}}}},
        {"e", {"2DF stability parameter e", "m1", "e", {{"e", m, e}}}},
        {"eig2", {"Second K eigenvalue a + d + 1", "m1", "a+d+1", {{"a+d+1", m, eig2}}}},
        {"e_eig2", {"e and a + d + 1", "m1", "value", {{"e", m, e}, {"a+d+1", m, eig2}}}},
    };
    for (const auto& [name, fig] : figures) {
        plot::write_dat(dir / (name + ".dat"), fig);
        if (svg) plot::write_svg(dir / (name + ".svg"), fig);
    }
}

void emit_outputs(const std::vector<StabilityRecord>& records, const SweepConfig& cfg) {
    if (records.empty()) throw std::invalid_argument("emit_outputs: no records");
    const std::filesystem::path dir = cfg.out_dir.empty() ? default_out_dir() : cfg.out_dir;
    std::filesystem::create_directories(dir);
    write_csv(dir / "sweep.csv", records);
    write_plots(records, dir, cfg.svg);
}

namespace {

double doubled(double x) { return std::cos(2.0 * std::acos(std::clamp(x, -1.0, 1.0))); }

struct Hit {
    double lo, hi;
    std::string cause;
};

}  // namespace

std::vector<DegenerateNeighborhood> degeneracy_census(const std::vector<StabilityRecord>& records, double lo,
                                                      double hi) {
    std::vector<StabilityRecord> pts;
    for (const auto& r : records)
        if (r.ok() && r.m1 >= lo - 1e-12 && r.m1 <= hi + 1e-12) pts.push_back(r);
    std::sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.m1 < y.m1; });

    std::vector<Hit> hits;
    for (const auto& r : pts)
        if (r.degenerate != Degeneracy::None) hits.push_back({r.m1, r.m1, to_string(r.degenerate)});

    // Each condition as a signed function whose zero is a repeated eigenvalue.
    const std::vector<std::pair<const char*, double (*)(const StabilityRecord&)>> conditions = {
        {"crossing", [](const StabilityRecord& r) { return r.e - r.eig2; }},
        {"unit_eigenvalue", [](const StabilityRecord& r) { return r.eig2 - 1.0; }},
        {"unit_eigenvalue", [](const StabilityRecord& r) { return r.eig2 + 1.0; }},
        {"unit_eigenvalue", [](const StabilityRecord& r) { return r.e - 1.0; }},
        {"unit_eigenvalue", [](const StabilityRecord& r) { return r.e + 1.0; }},
        {"zero_eigenvalue", [](const StabilityRecord& r) { return r.eig2; }},
        {"zero_eigenvalue", [](const StabilityRecord& r) { return r.e; }},
        {"doubled_angle", [](const StabilityRecord& r) { return doubled(r.e) - doubled(r.eig2); }},
    };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto& p = pts[i];
        const auto& q = pts[i + 1];
        if (!p.spectral_4df || !q.spectral_4df) continue;
        for (const auto& [cause, f] : conditions) {
            const double fp = f(p), fq = f(q);
            if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) hits.push_back({p.m1, q.m1, cause});
        }
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) { return x.lo < y.lo; });

    // Hits on the same or adjacent grid cells form one neighbourhood.
    std::vector<DegenerateNeighborhood> out;
    for (const auto& h : hits) {
        if (!out.empty() && h.lo <= out.back().m1_hi + 1e-12) {
            auto& nb = out.back();
            nb.m1_hi = std::max(nb.m1_hi, h.hi);
            if (std::find(nb.causes.begin(), nb.causes.end(), h.cause) == nb.causes.end()) nb.causes.push_back(h.cause);
        } else {
            out.push_back({h.lo, h.hi, {h.cause}});
        }
    }
    return out;
}

}  // namespace broucke
