#include "broucke/cli.hpp"

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "broucke/sweep.hpp"
#include "broucke/verify.hpp"

namespace broucke::cli {

namespace {

using nlohmann::json;

json vec_json(const Vec8& z) { return std::vector<double>(z.data(), z.data() + 8); }

json orbit_json(const OrbitSolution& orb) {
    const RegState x0 = initial_state(orb.params, orb.zeta4);
    const RegState& q = orb.quarter.sample(orb.quarter.size() - 1);
    return {
        {"m1", orb.params.m1()},
        {"m2", orb.params.m2()},
        {"mu", orb.params.mu()},
        {"energy", orb.params.energy()},
        {"zeta4", orb.zeta4},
        {"zeta1", orb.zeta1},
        {"zeta8", orb.zeta8},
        {"s0", orb.s0},
        {"T", orb.T},
        {"t_period", orb.t_period},
        {"section_residual", orb.residual},
        {"evaluations", orb.iterations},
        {"gamma_drift", orb.gamma_drift()},
        {"a_drift", orb.a_drift()},
        {"initial_state", vec_json(x0.z())},
        {"quarter_state", vec_json(q.z())},
        {"quarter_samples", orb.quarter.size()},
    };
}

json record_json(const StabilityRecord& r) {
    return {
        {"m1", r.m1},
        {"m2", r.m2},
        {"zeta4", r.zeta4},
        {"s0", r.s0},
        {"t_period", r.t_period},
        {"k11", r.k11},
        {"a", r.a},
        {"b", r.b},
        {"c", r.c},
        {"d", r.d},
        {"e", r.e},
        {"eig2", r.eig2},
        {"eig2_det", r.eig2_det},
        {"res_left_eig", r.res_left_eig},
        {"res_sparsity", r.res_sparsity},
        {"res_first_column", r.res_first_column},
        {"res_symplectic", r.res_symplectic},
        {"res_leakage", r.res_leakage},
        {"gamma_drift", r.gamma_drift},
        {"a2_drift", r.a2_drift},
        {"stable_2df", r.stable_2df},
        {"spectral_4df", r.spectral_4df},
        {"linear_4df", r.linear_4df},
        {"degenerate_cause", to_string(r.degenerate)},
        {"reliable", r.reliable},
        {"status", r.status},
    };
}

int fail(const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
}

}  // namespace

int dispatch(int argc, char** argv) {
    CLI::App app{"Broucke isosceles orbit: periodic orbit solver and monodromy stability"};
    app.require_subcommand(1);

    double m1 = 1.0;
    double energy = -1.0;
    double tol = 1e-12;
    double m1_limit = 1.465;

    auto* find = app.add_subcommand("find-orbit", "solve for the periodic orbit and print a JSON dump");
    find->add_option("--m1", m1, "mass of the equal pair, 0 < m1 < 1.5")->required();
    find->add_option("--e", energy, "energy (the orbit family is defined at E = -1)");
    find->add_option("--tol", tol, "integrator tolerance");
    find->add_option("--m1-limit", m1_limit, "largest mass attempted");

    auto* stab = app.add_subcommand("stability", "solve and classify one mass");
    stab->add_option("--m1", m1, "mass of the equal pair")->required();
    stab->add_option("--e", energy, "energy");
    stab->add_option("--tol", tol, "integrator tolerance");
    stab->add_option("--m1-limit", m1_limit, "largest mass attempted");

    SweepConfig cfg;
    std::string out_dir;
    auto* sweep = app.add_subcommand("sweep", "sweep the mass grid and write CSV, plot data and SVG");
    sweep->add_option("--min", cfg.m1_min, "first grid mass");
    sweep->add_option("--max", cfg.m1_max, "last grid mass");
    sweep->add_option("--step", cfg.step, "grid spacing");
    sweep->add_option("--e", cfg.energy, "energy");
    sweep->add_option("--tol", cfg.tol, "integrator tolerance");
    sweep->add_option("--delta", cfg.delta, "degeneracy window");
    sweep->add_option("--m1-limit", cfg.m1_limit, "masses above this are recorded as out_of_range");
    sweep->add_option("--out", out_dir, "output directory (default $BROUCKE_OUT_DIR or ./broucke_out)");
    sweep->add_option("--workers", cfg.workers, "worker threads (0: all cores)");
    sweep->add_flag("--resume", cfg.resume, "recompute only missing or failed grid points");
    bool no_svg = false;
    sweep->add_flag("--no-svg", no_svg, "skip SVG rendering");

    VerifyOptions vopts;
    auto* verify = app.add_subcommand("verify", "run the invariant suite at one mass");
    verify->add_option("--m1", m1, "mass of the equal pair")->required();
    verify->add_option("--tol", vopts.tol, "integrator tolerance");
    verify->add_option("--oracle-tol", vopts.oracle_tol, "tolerance for the full-period oracle");

    std::string in_csv;
    std::string plot_dir;
    auto* plot = app.add_subcommand("plot", "re-render plot data and SVG from an existing CSV");
    plot->add_option("--in", in_csv, "sweep CSV")->required()->check(CLI::ExistingFile);
    plot->add_option("--out", plot_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    OrbitOptions oo;
    oo.tol = tol;
    oo.m1_limit = m1_limit;

    try {
        if (*find) {
            const OrbitSolution orb = find_orbit(MassParams(m1, energy), std::nullopt, oo);
            std::cout << orbit_json(orb).dump(2) << '\n';
            return 0;
        }
        if (*stab) {
            const StabilityRecord rec = analyze(MassParams(m1, energy), std::nullopt, oo);
            std::cout << record_json(rec).dump(2) << '\n';
            if (!rec.ok()) {
                std::cerr << "error: orbit not found (" << rec.status << ")\n";
                return 1;
            }
            return 0;
        }
        if (*sweep) {
            cfg.out_dir = out_dir.empty() ? default_out_dir() : std::filesystem::path(out_dir);
            cfg.svg = !no_svg;
            cfg.validate();
            std::vector<StabilityRecord> previous;
            const auto csv = cfg.out_dir / "sweep.csv";
            if (cfg.resume && std::filesystem::exists(csv)) previous = read_csv(csv);
            const auto records = run_sweep(cfg, previous);
            emit_outputs(records, cfg);
            std::size_t ok = 0, s2 = 0, s4 = 0;
            for (const auto& r : records) {
                ok += r.ok();
                s2 += r.stable_2df;
                s4 += r.spectral_4df;
            }
            std::printf("%zu grid points, %zu solved, %zu 2DF-stable, %zu 4DF spectrally stable\nwrote %s\n",
                        records.size(), ok, s2, s4, csv.string().c_str());
            return 0;
        }
        if (*verify) {
            vopts.orbit.m1_limit = m1_limit;
            const VerifyReport rep = verify_mass(MassParams(m1), vopts);
            std::printf("m1 = %.17g  zeta4 = %.17g  e = %.17g  eig2 = %.17g\n", rep.record.m1, rep.record.zeta4,
                        rep.record.e, rep.record.eig2);
            for (const auto& c : rep.checks)
                std::printf("%-4s %-45s %12.3e  < %.0e\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value,
                            c.threshold);
            return rep.all_pass() ? 0 : 1;
        }
        if (*plot) {
            write_plots(read_csv(in_csv), plot_dir, true);
            std::printf("wrote plots to %s\n", plot_dir.c_str());
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        return fail(e);
    }
    return 2;
}

}  // namespace broucke::cli
