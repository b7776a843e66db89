#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "zeno_dd/commands.hpp"
#include "zeno_dd/config.hpp"
#include "zeno_dd/csv.hpp"
#include "zenodd/errors.hpp"

using namespace zeno_dd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("zeno_dd_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_exe(const std::string& args) {
    const std::string cmd = std::string(ZENO_DD_EXE) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Grid, DefaultGridIsFixed) {
    const std::vector<int> g = geometric_grid(1, 100, 24);
    const std::vector<int> expect = {1,  2,  3,  4,  5,  6,  7,  8,  9,  10, 11, 12,
                                     13, 14, 16, 20, 25, 30, 37, 45, 55, 67, 82, 100};
    EXPECT_EQ(g, expect);
    EXPECT_EQ(geometric_grid(4, 4, 1), std::vector<int>{4});
    const std::vector<int> small = geometric_grid(1, 5, 10);
    EXPECT_EQ(small.back(), 5);
    for (std::size_t k = 1; k < small.size(); ++k) EXPECT_LT(small[k - 1], small[k]);
    EXPECT_THROW(geometric_grid(0, 10, 3), UsageError);
    EXPECT_THROW(geometric_grid(10, 5, 3), UsageError);
}

TEST(Config, SettingsAndText) {
    ExperimentConfig cfg;
    apply_setting(cfg, "n_values", "4, 8,16");
    apply_setting(cfg, "big_t", "0.5");
    apply_setting(cfg, "statistics", "purity-1,opnorm-2");
    apply_setting(cfg, "threads", "3");
    EXPECT_EQ(n_grid(cfg), (std::vector<int>{4, 8, 16}));
    EXPECT_DOUBLE_EQ(cfg.big_t, 0.5);
    EXPECT_EQ(cfg.statistics.size(), 2u);
    EXPECT_EQ(resolve_threads(cfg), 3u);

    apply_config_text(cfg, "# comment\nseed = 42\n\nsamples=7  # trailing\nsigma2 = max-mixed\n");
    EXPECT_EQ(cfg.seed, 42u);
    EXPECT_EQ(cfg.samples.value(), 7u);
    EXPECT_EQ(cfg.sigma2, "max-mixed");

    EXPECT_THROW(apply_setting(cfg, "no-such-key", "1"), UsageError);
    EXPECT_THROW(apply_setting(cfg, "seed", "abc"), UsageError);
    ExperimentConfig zero;
    apply_setting(zero, "n-min", "0");
    EXPECT_THROW(n_grid(zero), UsageError);
    EXPECT_THROW(apply_config_text(cfg, "seed 4\n"), UsageError);
    EXPECT_THROW(apply_config_file(cfg, "/nonexistent/zeno.cfg"), IoError);
}

TEST(Config, ModelsSetsAndSigmas) {
    ExperimentConfig cfg;
    EXPECT_NEAR(build_model(cfg).big_t, 1.0, 1e-12);
    cfg.model = "random(7)";
    cfg.d2 = 3;
    EXPECT_EQ(build_model(cfg).dim(), 6);
    cfg.model = "reference";
    EXPECT_THROW(build_model(cfg), UsageError);
    cfg.model = "nonsense";
    cfg.d2 = 2;
    EXPECT_THROW(build_model(cfg), UsageError);

    cfg.set = "pauli-atypical";
    EXPECT_FALSE(build_set(cfg).is_uniform());
    cfg.set = "bogus";
    EXPECT_THROW(build_set(cfg), UsageError);

    EXPECT_EQ(build_sigma("pure-0", 2)(0, 0), zenodd::Complex(1.0, 0.0));
    EXPECT_EQ(build_sigma("max-mixed", 3)(2, 2), zenodd::Complex(1.0 / 3.0, 0.0));
    EXPECT_THROW(build_sigma("other", 2), UsageError);
    EXPECT_EQ(sigma_label("file:/tmp/my_state.txt"), "my_state");
    EXPECT_EQ(sigma_label("max-mixed"), "max-mixed");
}

TEST(Config, MatrixFiles) {
    const fs::path dir = scratch("files");
    std::ofstream(dir / "sigma.txt") << "0.5+0j 0+0j\n0+0j 0.5+0j\n";
    std::ofstream(dir / "bad.txt") << "1+0j 0+0j\n0+0j 1+0j\n";
    std::ofstream(dir / "set.txt") << "@ A 1\n1+0j 0+0j\n0+0j 1+0j\n@ B 3\n0+0j 1+0j\n1+0j 0+0j\n";
    EXPECT_EQ(build_sigma("file:" + (dir / "sigma.txt").string(), 2)(1, 1), zenodd::Complex(0.5, 0.0));
    EXPECT_THROW(build_sigma("file:" + (dir / "bad.txt").string(), 2), UsageError);
    EXPECT_THROW(build_sigma("file:" + (dir / "missing.txt").string(), 2), IoError);
    ExperimentConfig cfg;
    cfg.set = "file:" + (dir / "set.txt").string();
    const zenodd::DecouplingSet set = build_set(cfg);
    EXPECT_EQ(set.size(), 2u);
    EXPECT_NEAR(set.probabilities()[1], 0.75, 1e-15);
}

TEST(Csv, Formatting) {
    EXPECT_EQ(format_cell(0.1), "0.1");
    EXPECT_EQ(format_cell(-0.0), "0");
    EXPECT_EQ(format_cell(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_cell(std::nan("")), "");
    EXPECT_EQ(format_cell(12345678), "12345678");
    CsvSeries s{"x.csv", {"n", "v"}, {}};
    s.add_row({1, 0.5});
    s.add_row({2, std::nan("")});
    EXPECT_EQ(render_csv(s), "n,v\n1,0.5\n2,\n");
    EXPECT_DOUBLE_EQ(s.at(0, "v"), 0.5);
    EXPECT_EQ(s.column("n"), (std::vector<double>{1, 2}));
    EXPECT_THROW(s.add_row({1.0}), std::invalid_argument);
}

TEST(Csv, Filenames) {
    EXPECT_EQ(series_filename("trajectories", "purity-1", "pure-0", {1, 5, 100}),
              "trajectories_purity-1_pure-0_n1-100.csv");
    EXPECT_EQ(presentation("purity-1").partner, 2);
    EXPECT_EQ(presentation("purity-2").partner, 1);
    EXPECT_TRUE(presentation("purity-1").deficit);
    EXPECT_FALSE(presentation("frob-dist-2-zeno").deficit);
    EXPECT_THROW(presentation("nope"), UsageError);
}

TEST(Commands, ZenoErrorsStayBelowBounds) {
    ExperimentConfig cfg;
    cfg.n_values = {1, 10, 100};
    const CommandResult r = cmd_zeno(cfg);
    ASSERT_TRUE(r.ok());
    const CsvSeries& s = r.series.front();
    for (std::size_t k = 0; k < s.rows.size(); ++k) {
        EXPECT_LE(s.at(k, "error"), s.at(k, "bound"));
        EXPECT_LE(s.at(k, "sandwich_error"), s.at(k, "sandwich_bound"));
    }
}

TEST(Commands, TrajectoriesAreThreadIndependent) {
    ExperimentConfig cfg;
    cfg.n_values = {2, 9, 30};
    cfg.samples = 25;
    cfg.statistics = {"purity-1", "opnorm-dist-1-leading", "frob-dist-2-zeno"};
    cfg.threads = 1;
    const CommandResult one = cmd_trajectories(cfg);
    cfg.threads = 8;
    const CommandResult eight = cmd_trajectories(cfg);
    ASSERT_EQ(one.series.size(), 3u);
    for (std::size_t k = 0; k < one.series.size(); ++k) {
        EXPECT_EQ(one.series[k].filename, eight.series[k].filename);
        EXPECT_EQ(render_csv(one.series[k]), render_csv(eight.series[k]));
    }
}

TEST(Commands, TailRejectsThreshold) {
    ExperimentConfig cfg;
    cfg.threshold = 1.5;
    EXPECT_THROW(cmd_tail(cfg), UsageError);
}

TEST(Commands, FixturesDumpReferenceData) {
    ExperimentConfig cfg;
    cfg.n_values = {1, 50, 100};
    const CommandResult r = cmd_fixtures(cfg);
    ASSERT_EQ(r.text_files.size(), 3u);
    const CsvSeries& s = r.series.front();
    for (std::size_t k = 0; k < s.rows.size(); ++k) {
        for (const char* col : {"typical", "atypical"}) {
            EXPECT_GE(s.at(k, col), 0.25 - 1e-12);
            EXPECT_LE(s.at(k, col), 1.0 + 1e-12);
        }
    }
    EXPECT_NE(s.at(2, "atypical"), s.at(2, "typical"));
    cfg.n_values = {101};
    EXPECT_THROW(cmd_fixtures(cfg), UsageError);
}

TEST(Executable, ExitCodes) {
    const fs::path dir = scratch("exe");
    const std::string out = " --out " + dir.string();
    EXPECT_EQ(run_exe("zeno --n-values 1,10" + out), 0);
    EXPECT_TRUE(fs::exists(dir / "zeno_error_none_n1-10.csv"));
    EXPECT_EQ(run_exe("zeno --n-values 1,x" + out), 2);
    EXPECT_EQ(run_exe("frobnicate"), 2);
    EXPECT_EQ(run_exe("zeno --config /nonexistent/file.cfg" + out), 3);
    EXPECT_EQ(run_exe("zeno --model file:/nonexistent/h.txt" + out), 3);
    EXPECT_EQ(run_exe("verify --n-values 5 --inject-fault projector" + out), 1);
    EXPECT_EQ(run_exe("verify --inject-fault gremlins" + out), 2);
}

TEST(Executable, OutputIsByteIdenticalAcrossThreads) {
    const fs::path a = scratch("threads1");
    const fs::path b = scratch("threads8");
    const std::string common = "trajectories --n-values 3,12 --samples 20 --statistics purity-2,opnorm-1";
    ASSERT_EQ(run_exe(common + " --threads 1 --out " + a.string()), 0);
    ASSERT_EQ(run_exe(common + " --threads 8 --out " + b.string()), 0);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
        ++files;
    }
    EXPECT_EQ(files, 2u);
}
