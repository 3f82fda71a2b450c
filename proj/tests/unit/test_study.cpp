#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "taxisfv/presets.hpp"
#include "taxisfv/snapshot_io.hpp"
#include "taxisfv/stability.hpp"
#include "taxisfv/study.hpp"

#ifdef TAXISFV_HAVE_CLI
#include "cli.hpp"
#endif

using namespace taxisfv;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("taxisfv_study_" + std::to_string(::getpid())) / name;
    fs::remove_all(d);
    ensure_directory(d);
    return d;
}

RunConfig small_reduced() {
    RunConfig c = preset_config(PresetId::Reduced);
    c.cells = 80;
    c.t_end = 1.0;
    return c;
}

double total_mass(const Grid1D& g, const std::vector<double>& w, std::size_t n, std::size_t s) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) m += g.width(i) * w[i * n + s];
    return m;
}

}  // namespace

TEST(ReferenceCache, StoreLoadRoundTrip) {
    const ReferenceCache cache(scratch("cache"));
    const std::vector<double> data{1.0, -2.5, 1e-300, std::nextafter(1.0, 2.0)};
    EXPECT_FALSE(cache.load("key-a").has_value());
    cache.store("key-a", data);
    const auto back = cache.load("key-a");
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, data);
    EXPECT_FALSE(cache.load("key-b").has_value());
    EXPECT_EQ(ReferenceCache::digest("key-a"), ReferenceCache::digest("key-a"));
    EXPECT_NE(ReferenceCache::digest("key-a"), ReferenceCache::digest("key-b"));
    EXPECT_TRUE(fs::exists(cache.path_for("key-a")));
}

TEST(ReferenceCache, KeyIgnoresTestSideSettings) {
    RunConfig a = preset_config(PresetId::I);
    RunConfig b = a;
    b.cells = 123;
    b.test_cells = {7, 8};
    b.amr = true;
    EXPECT_EQ(reference_key(a, {}), reference_key(b, {}));
    b.upa.D_c = 4e-4;
    EXPECT_NE(reference_key(a, {}), reference_key(b, {}));
    EXPECT_NE(reference_key(a, {}), reference_key(a, {1.0, 2.0}));
    b = a;
    b.reference_cells = 30000;
    EXPECT_NE(reference_key(a, {}), reference_key(b, {}));
}

TEST(Run1D, DeterministicAndHitsSamples) {
    const RunConfig c = small_reduced();
    std::vector<double> seen;
    const RunResult1D r1 = run_1d(c, {0.25, 0.5}, [&](double t, const Grid1D&, std::span<const double>) {
        seen.push_back(t);
    });
    const RunResult1D r2 = run_1d(c, {0.25, 0.5});
    EXPECT_EQ(r1.t, 1.0);
    EXPECT_EQ(r1.state, r2.state);
    ASSERT_EQ(seen.size(), 2u);
    EXPECT_DOUBLE_EQ(seen[0], 0.25);
    EXPECT_DOUBLE_EQ(seen[1], 0.5);
    EXPECT_EQ(r1.cell_history.front().first, 0.0);
    EXPECT_EQ(r1.cell_history.size(), r1.steps + 1);
}

TEST(Run1D, AdaptiveRunConservesMassAcrossAdapts) {
    RunConfig c = preset_config(PresetId::I);
    c.cells = 100;
    c.t_end = 0.5;
    c.amr = true;
    c.amr_config.smooth = true;
    c.amr_config.monitor.c_ref = 2.0;
    c.amr_config.monitor.c_coa = 1.0;
    const RunResult1D r = run_1d(c);
    EXPECT_GT(r.adapt.adapts, 0u);
    EXPECT_GT(r.adapt.grid_changes, 0u);
    EXPECT_LT(r.adapt.worst_mass_error, 1e-14);
    EXPECT_TRUE(r.adapt.smooth_respected);
    EXPECT_GT(max_cells(r, 0.5), 100u);
    EXPECT_GE(average_cells(r, 0.5), 100.0);
}

TEST(Run1D, GradientMonitorCellCountsMatchPublishedTable) {
    // Gradient monitor, no smoothing, t <= 35: max 484, average 443.6 (15% band).
    RunConfig c = preset_config(PresetId::I);
    apply_amr_bench_defaults(c);
    c.t_end = 35.0;
    const RunResult1D r = run_1d(c);
    EXPECT_NEAR(average_cells(r, 35.0), 443.6, 0.15 * 443.6);
    EXPECT_NEAR(static_cast<double>(max_cells(r, 35.0)), 484.0, 0.15 * 484.0);
    EXPECT_LE(r.grid.max_level(), c.amr_config.l_max - 1);
}

TEST(Run1D, CellAveragesAreStepAverages) {
    RunResult1D r;
    r.cell_history = {{0.0, 10}, {1.0, 20}, {2.0, 30}, {3.0, 100}};
    EXPECT_DOUBLE_EQ(average_cells(r, 2.0), 20.0);
    EXPECT_EQ(max_cells(r, 2.0), 30u);
    EXPECT_EQ(max_cells(r, 3.0), 100u);
}

TEST(Run1D, ZeroReactionConservesMass) {
    RunConfig c = small_reduced();
    c.reduced.mu = 0.0;
    c.reduced.alpha = 0.0;
    c.reduced.beta = 0.0;
    const RunResult1D r = run_1d(c);
    const Grid1D g0 = Grid1D::uniform(c.domain_a, c.domain_b, c.cells);
    const auto w0 = initial_state_1d(c, g0);
    EXPECT_NEAR(total_mass(r.grid, r.state, 2, 0), total_mass(g0, w0, 2, 0), 1e-12);
}

TEST(Convergence, SmallStudyConverges) {
    RunConfig c = preset_config(PresetId::Reduced);
    c.t_end = 2.0;
    c.test_cells = {50, 100, 200};
    c.reference_cells = 2000;
    const ReferenceCache cache(scratch("conv"));
    const ConvergenceResult first = run_convergence_study(c, &cache);
    EXPECT_FALSE(first.reference_cached);
    EXPECT_FALSE(first.verdict.nonconvergent) << first.verdict.reason;
    ASSERT_EQ(first.reports.size(), 3u);
    ASSERT_TRUE(first.eoc_between(100, 200).has_value());
    EXPECT_GT(*first.eoc_between(100, 200), 1.0);
    const ConvergenceResult second = run_convergence_study(c, &cache);
    EXPECT_TRUE(second.reference_cached);
    EXPECT_EQ(*second.error_at(200), *first.error_at(200));
}

TEST(Convergence, ReferenceTooCoarseIsRejected) {
    RunConfig c = preset_config(PresetId::Reduced);
    c.t_end = 0.1;
    c.test_cells = {50, 100};
    c.reference_cells = 500;
    EXPECT_THROW((void)run_convergence_study(c, nullptr), std::exception);
}

TEST(Growth, LinearModeGrowsAtDispersionRate) {
    const ReducedParameters p;
    const GrowthCheck g = reduced_growth_check(p, 80.0);
    const std::vector<double> steady{1.0, p.alpha / p.beta};
    EXPECT_NEAR(g.lambda, lambda_k(make_reduced_system(p), steady, 80.0), 1e-14);
    EXPECT_GT(g.lambda, 0.0);
    EXPECT_NEAR(g.amplitude_ratio / std::exp(g.lambda * g.t_end), 1.0, 0.02);
    const GrowthCheck d = reduced_growth_check(p, 300.0);
    EXPECT_LT(d.lambda, 0.0);
    EXPECT_NEAR(d.amplitude_ratio / std::exp(d.lambda * d.t_end), 1.0, 0.02);
}

TEST(TwoD, MemoryEstimateScalesWithCells) {
    RunConfig c = preset_config(PresetId::TwoD);
    c.cells = 100;
    const double m100 = estimate_2d_memory(c);
    c.cells = 200;
    EXPECT_NEAR(estimate_2d_memory(c) / m100, 4.0, 1e-12);
}

TEST(TwoD, ShortRunStaysFinite) {
    RunConfig c = preset_config(PresetId::TwoD);
    c.cells = 30;
    c.t_end = 0.5;
    c.output_interval = 0.25;
    int snapshots = 0;
    const Run2DResult r = run_2d(c, [&](double, const Grid2D&, std::span<const double>) { ++snapshots; });
    EXPECT_EQ(r.t, 0.5);
    EXPECT_EQ(snapshots, 3);
    ASSERT_EQ(r.snapshots.size(), 3u);
    for (const auto& s : r.snapshots) {
        EXPECT_TRUE(s.finite);
        EXPECT_GE(s.min_c, -1e-9);
    }
}

#ifdef TAXISFV_HAVE_CLI

namespace {

int run_cli(std::vector<std::string> args, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (err_text) *err_text = err.str();
    return code;
}

}  // namespace

TEST(Cli, ExitCodes) {
    const fs::path out = scratch("cli");
    EXPECT_EQ(run_cli({"taxisfv", "dispersion", "--out", out.string()}), cli::kSuccess);
    EXPECT_TRUE(fs::exists(out / "dispersion.csv"));
    EXPECT_TRUE(fs::exists(out / "dispersion_band.csv"));
    const CsvTable band = read_csv(out / "dispersion_band.csv");
    ASSERT_EQ(band.rows(), 1u);
    EXPECT_NEAR(band.column("k_lo")[0], 20.14508772, 1e-3);

    std::string err;
    EXPECT_EQ(run_cli({"taxisfv", "run", "--set", "bogus=1", "--out", out.string()}, &err), cli::kConfigError);
    EXPECT_NE(err.find("bogus"), std::string::npos);
    EXPECT_EQ(run_cli({"taxisfv", "run", "--cfl", "1.5", "--out", out.string()}), cli::kConfigError);
    EXPECT_EQ(run_cli({"taxisfv", "run", "--no-such-flag"}), cli::kConfigError);
    EXPECT_EQ(run_cli({"taxisfv", "run", "--config", "/nonexistent.cfg"}), cli::kConfigError);
    EXPECT_EQ(run_cli({"taxisfv", "run", "--preset", "I", "--method", "EXPLICIT", "--cells", "50", "--t-end", "1",
                       "--cfl", "1", "--set", "chi_u=1e4", "--out", out.string()},
                      &err),
              cli::kNumericalFailure);
    EXPECT_NE(err.find("non-finite"), std::string::npos);
}

TEST(Cli, RunWritesSchemas) {
    const fs::path out = scratch("cli_run");
    ASSERT_EQ(run_cli({"taxisfv", "run", "--preset", "REDUCED", "--cells", "40", "--t-end", "0.5", "--out",
                       out.string()}),
              cli::kSuccess);
    const CsvTable snap = read_csv(out / "snapshot_final.csv");
    EXPECT_EQ(snap.columns, (std::vector<std::string>{"x", "h", "level", "c", "u"}));
    EXPECT_EQ(snap.rows(), 40u);
    const CsvTable m = read_csv(out / "metrics.csv");
    EXPECT_EQ(m.columns.front(), "t");
    EXPECT_EQ(m.columns.back(), "E");
    for (std::size_t i = 1; i < m.rows(); ++i) EXPECT_GT(m.column("t")[i], m.column("t")[i - 1]);
    EXPECT_TRUE(fs::exists(out / "run.json"));
}

TEST(Cli, ConfigFileAndFlagsCompose) {
    const fs::path out = scratch("cli_cfg");
    {
        std::ofstream f(out / "run.cfg");
        f << "preset = REDUCED\ncells = 30\nt_end = 0.2\n";
    }
    ASSERT_EQ(run_cli({"taxisfv", "run", "--config", (out / "run.cfg").string(), "--cells", "45", "--out",
                       out.string()}),
              cli::kSuccess);
    EXPECT_EQ(read_csv(out / "snapshot_final.csv").rows(), 45u);
}

#endif
