#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"

#include "broucke/cli.hpp"
#include "broucke/sweep.hpp"

namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "broucke");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    return broucke::cli::dispatch(static_cast<int>(args.size()), argv.data());
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
    CHECK(run({}) == 2);
    CHECK(run({"bogus"}) == 2);
    CHECK(run({"find-orbit"}) == 2);
    CHECK(run({"find-orbit", "--m1", "abc"}) == 2);
    CHECK(run({"find-orbit", "--m1", "2.0"}) == 2);
    CHECK(run({"sweep", "--min", "0.9", "--max", "0.8"}) == 2);
}

TEST_CASE("find-orbit") {
    CHECK(run({"find-orbit", "--m1", "1.0"}) == 0);
    // Outside the supported range: graceful failure.
    CHECK(run({"find-orbit", "--m1", "1.49"}) == 1);
}

TEST_CASE("stability and verify") {
    CHECK(run({"stability", "--m1", "0.65"}) == 0);
    CHECK(run({"stability", "--m1", "1.49"}) == 1);
    CHECK(run({"verify", "--m1", "1.0"}) == 0);
}

TEST_CASE("sweep, resume and plot") {
    const fs::path dir = fs::temp_directory_path() / "broucke_cli_sweep";
    fs::remove_all(dir);
    CHECK(run({"sweep", "--min", "0.6", "--max", "0.7", "--step", "0.05", "--out", dir.string()}) == 0);
    const auto recs = broucke::read_csv(dir / "sweep.csv");
    CHECK(recs.size() == 3);
    CHECK(run({"sweep", "--min", "0.6", "--max", "0.7", "--step", "0.05", "--out", dir.string(), "--resume"}) == 0);
    CHECK(broucke::read_csv(dir / "sweep.csv").size() == 3);

    const fs::path plots = dir / "replot";
    CHECK(run({"plot", "--in", (dir / "sweep.csv").string(), "--out", plots.string()}) == 0);
    CHECK(fs::exists(plots / "e_eig2.svg"));
    CHECK(run({"plot", "--in", (dir / "missing.csv").string(), "--out", plots.string()}) == 2);
    fs::remove_all(dir);
}

}  // TEST_SUITE
