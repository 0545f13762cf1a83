#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "netlearn/config.hpp"
#include "netlearn/experiment.hpp"
#include "netlearn/rng.hpp"

using namespace netlearn;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_SUITE("config") {
    TEST_CASE("round-trips losslessly through JSON") {
        ExperimentConfig c;
        c.signal.kind = "table";
        c.signal.table.alphabet = {"hi", "lo"};
        c.signal.table.dist_g = {0.8, 0.2};
        c.signal.table.dist_b = {0.3, 0.7};
        c.network.kind = "custom";
        c.network.n = 3;
        c.network.edges = {{1, 2}, {2, 3}, {3, 1}};
        c.horizon = 7;
        c.trials = 12345;
        c.seed = 99;
        c.engine = "generic";
        c.mode = "monte_carlo";
        c.rate_window.policy = "explicit";
        c.rate_window.t_min = 2;
        c.rate_window.t_max = 6;
        c.delta = 0.25;
        c.threads = 3;
        c.blocks = 17;
        c.collect_violations = true;
        c.out_dir = "out/x";

        const json j = c;
        ExperimentConfig back = j.get<ExperimentConfig>();
        CHECK(json(back) == j);
        CHECK(config_hash(back) == config_hash(c));

        ExperimentConfig other = c;
        other.seed = 100;
        CHECK(config_hash(other) != config_hash(c));
    }

    TEST_CASE("validation rejects malformed configs") {
        CHECK_THROWS_AS(parse_config_text("not json"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("{}"), ConfigError); // missing fields
        CHECK_THROWS_AS(
            parse_config_text(R"({"signal":{"kind":"symmetric_binary","p":1.5},
                                  "network":{"kind":"complete","n":2},"horizon":3})"),
            ConfigError);
        CHECK_THROWS_AS(
            parse_config_text(R"({"signal":{"kind":"symmetric_binary","p":0.9},
                                  "network":{"kind":"complete","n":2},"horizon":3,
                                  "mode":"exactly"})"),
            ConfigError);
        CHECK_NOTHROW(
            parse_config_text(R"({"signal":{"kind":"symmetric_binary","p":0.9},
                                  "network":{"kind":"complete","n":2},"horizon":3})"));
    }

    TEST_CASE("presets are valid and named") {
        for (const std::string& name : preset_names()) {
            ExperimentConfig c = preset_config(name);
            CHECK_NOTHROW(c.validate());
        }
        CHECK_THROWS_AS(preset_config("nope"), ConfigError);
    }

    TEST_CASE("auto engine choice is always applicable") {
        // property: over random configurations, constructing the resolved
        // engine never throws an applicability error
        Xoshiro256pp rng(31);
        for (int iter = 0; iter < 200; ++iter) {
            const double p = 0.5 + 0.49 * rng.uniform01();
            SignalModel model = make_symmetric_binary(p);
            const std::size_t n = 1 + rng.next() % 5;
            Topology topo;
            switch (rng.next() % 4) {
                case 0: topo = Topology::complete; break;
                case 1: topo = Topology::star; break;
                case 2: topo = Topology::ring; break;
                default: topo = Topology::autarky; break;
            }
            Network net = make_topology(topo, n);
            const std::size_t T = 1 + rng.next() % 4;
            const EngineKind kind = resolve_engine(EngineChoice::automatic, model, net);
            CHECK_NOTHROW(EngineHandle(model, net, T, kind));
        }
    }

    TEST_CASE("experiment bundle round-trips and hash matches the echo") {
        ExperimentConfig config;
        config.signal.p = 0.8;
        config.network.kind = "complete";
        config.network.n = 2;
        config.horizon = 6;
        config.trials = 30000;
        config.seed = 7;
        config.out_dir = (fs::temp_directory_path() / "netlearn_test_bundle").string();
        fs::remove_all(config.out_dir);

        ExperimentResult result = run_experiment(config);
        CHECK(result.invariants.ok());
        CHECK(fs::exists(fs::path(config.out_dir) / "curve.csv"));

        // config echo reproduces the hash
        json echoed = json::parse(slurp(fs::path(config.out_dir) / "config.json"));
        ExperimentConfig back = echoed.get<ExperimentConfig>();
        CHECK(config_hash(back) == result.hash);

        // curve file round-trips with block counts intact
        MistakeCurve loaded = read_curve_csv((fs::path(config.out_dir) / "curve.csv").string());
        REQUIRE(loaded.agents() == 2);
        REQUIRE(loaded.horizon() == 6);
        CHECK(loaded.blocks().size() == result.curve.blocks().size());
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t t = 0; t < 6; ++t)
                for (auto c : {Conditioning::unconditional, Conditioning::given_g,
                               Conditioning::given_b}) {
                    CHECK(loaded.mistakes(c, i, t) == result.curve.mistakes(c, i, t));
                    CHECK(loaded.trials(c) == result.curve.trials(c));
                }

        // bootstrapped standard errors reproduce exactly from the files
        RateEstimate from_file = estimate_rate(loaded, 0, RateMethod::ols_log);
        RateEstimate in_memory = estimate_rate(result.curve, 0, RateMethod::ols_log);
        CHECK(from_file.rate == in_memory.rate);
        CHECK(from_file.se == in_memory.se);
    }

    TEST_CASE("exact-forward experiment bundle") {
        ExperimentConfig config;
        config.signal.p = 0.9;
        config.network.kind = "autarky";
        config.network.n = 1;
        config.horizon = 12;
        config.mode = "exact_forward";
        config.rate_window.policy = "explicit";
        config.rate_window.t_min = 2;
        config.rate_window.t_max = 12;
        config.out_dir = (fs::temp_directory_path() / "netlearn_test_exact").string();
        fs::remove_all(config.out_dir);

        ExperimentResult result = run_experiment(config);
        REQUIRE(result.estimates.size() == 1);
        CHECK(result.estimates[0].se == 0.0);
        MistakeCurve loaded = read_curve_csv((fs::path(config.out_dir) / "curve.csv").string());
        CHECK(loaded.exact());
        for (std::size_t t = 0; t < 12; ++t)
            CHECK(loaded.p_hat(Conditioning::unconditional, 0, t) ==
                  doctest::Approx(result.curve.p_hat(Conditioning::unconditional, 0, t))
                      .epsilon(1e-15));
    }

#ifdef NETLEARN_CLI_PATH
    TEST_CASE("cli exit codes and determinism") {
        const std::string cli = NETLEARN_CLI_PATH;
        const fs::path dir = fs::temp_directory_path() / "netlearn_test_cli";
        fs::remove_all(dir);
        fs::create_directories(dir);

        auto sh = [&](const std::string& cmd) { return std::system(cmd.c_str()) >> 8 & 0xff; };

        CHECK(sh(cli + " bounds --p 0.9 > " + (dir / "bounds.txt").string()) == 0);
        const std::string bounds = slurp(dir / "bounds.txt");
        CHECK(bounds.find("4.3944") != std::string::npos);
        CHECK(bounds.find("0.5108") != std::string::npos);
        CHECK(bounds.find("9") != std::string::npos);

        // config error -> 2
        CHECK(sh(cli + " run --config " + (dir / "missing.json").string() + " 2>/dev/null") == 2);
        // resource budget -> 3
        {
            std::ofstream cfg(dir / "big.json");
            cfg << R"({"signal":{"kind":"symmetric_binary","p":0.9},
                       "network":{"kind":"ring","n":5},"horizon":9,
                       "trials":10,"mode":"monte_carlo","out_dir":")"
                << (dir / "big_out").string() << R"("})";
        }
        CHECK(sh(cli + " run --config " + (dir / "big.json").string() + " 2>/dev/null") == 3);

        // same config and seed, 1 vs 8 workers: byte-identical tables
        {
            std::ofstream cfg(dir / "det.json");
            cfg << R"({"signal":{"kind":"symmetric_binary","p":0.9},
                       "network":{"kind":"complete","n":2},"horizon":5,
                       "trials":20000,"seed":5,"out_dir":")"
                << (dir / "d1").string() << R"("})";
        }
        CHECK(sh(cli + " run --config " + (dir / "det.json").string() +
                 " --threads 1 > /dev/null") == 0);
        CHECK(sh(cli + " run --config " + (dir / "det.json").string() + " --threads 8 --out " +
                 (dir / "d8").string() + " > /dev/null") == 0);
        for (const char* f : {"curve.csv", "blocks.csv", "rates.csv"})
            CHECK(slurp(dir / "d1" / f) == slurp(dir / "d8" / f));

        // rates subcommand consumes the emitted curve
        CHECK(sh(cli + " rates --curve " + (dir / "d1" / "curve.csv").string() + " > " +
                 (dir / "rates.txt").string()) == 0);
        CHECK(slurp(dir / "rates.txt").find("agent") != std::string::npos);
    }
#endif
}
