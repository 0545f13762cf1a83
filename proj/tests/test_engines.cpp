#include <doctest.h>

#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include "netlearn/engine_factorized.hpp"
#include "netlearn/engine_generic.hpp"
#include "netlearn/engine_star.hpp"
#include "netlearn/theory.hpp"

using namespace netlearn;

namespace {

const double kLn9 = std::log(9.0);

// ---------------------------------------------------------------------------
// Independent oracle: the Bayesian definitions evaluated directly by
// recursion over the probability space. No action maps, no buckets, no
// filters: the action of agent j at period t is the myopic action under the
// posterior obtained by enumerating every signal matrix that produces the
// same observations for j, where consistency of a candidate matrix is
// decided by recursively evaluating the earlier actions it induces.
// Deliberately slow; usable for n*T up to ~12 binary cells.
// ---------------------------------------------------------------------------
class BruteOracle {
public:
    BruteOracle(const SignalModel& model, const Network& net, std::size_t T)
        : model_(model), net_(net), T_(T), n_(net.size()) {}

    // posterior log-odds of agent i at period t (1-based) on matrix `mat`
    double posterior_llr(std::size_t i, std::size_t t, const SignalMatrix& mat) {
        double wg = 0.0, wb = 0.0;
        SignalMatrix alt(n_, T_);
        const std::size_t cells = n_ * t;
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << cells); ++code) {
            for (std::size_t j = 0; j < n_; ++j)
                for (std::size_t tau = 0; tau < t; ++tau)
                    alt.at(j, tau) = (code >> (j * t + tau)) & 1;
            bool own_match = true;
            for (std::size_t tau = 0; tau < t && own_match; ++tau)
                own_match = alt.at(i, tau) == mat.at(i, tau);
            if (!own_match) continue;
            if (!history_matches(i, t, alt, mat)) continue;
            wg += weight(alt, t, State::g);
            wb += weight(alt, t, State::b);
        }
        return std::log(wg) - std::log(wb);
    }

    // social log-odds: same filter but with agent i's own signals free
    double social_llr(std::size_t i, std::size_t t, const SignalMatrix& mat) {
        double wg = 0.0, wb = 0.0;
        SignalMatrix alt(n_, T_);
        const std::size_t cells = n_ * t;
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << cells); ++code) {
            for (std::size_t j = 0; j < n_; ++j)
                for (std::size_t tau = 0; tau < t; ++tau)
                    alt.at(j, tau) = (code >> (j * t + tau)) & 1;
            if (!history_matches(i, t, alt, mat)) continue;
            wg += weight(alt, t, State::g);
            wb += weight(alt, t, State::b);
        }
        return std::log(wg) - std::log(wb);
    }

    Action action(std::size_t j, std::size_t t, const SignalMatrix& mat) {
        const auto key = std::make_tuple(j, t, pack(mat, t));
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        const Action a = action_from_llr(posterior_llr(j, t, mat));
        memo_.emplace(key, a);
        return a;
    }

private:
    bool history_matches(std::size_t i, std::size_t t, const SignalMatrix& alt,
                         const SignalMatrix& mat) {
        for (std::size_t tau = 1; tau < t; ++tau)
            for (auto j : net_.neighbors(i))
                if (action(j, tau, alt) != action(j, tau, mat)) return false;
        return true;
    }

    double weight(const SignalMatrix& m, std::size_t upto, State theta) {
        double w = 1.0;
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t tau = 0; tau < upto; ++tau) {
                const SignalTable& tab = model_.table(j, tau);
                w *= theta == State::g ? tab.dist_g[m.at(j, tau)] : tab.dist_b[m.at(j, tau)];
            }
        return w;
    }

    std::uint64_t pack(const SignalMatrix& m, std::size_t upto) const {
        std::uint64_t code = 0;
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t tau = 0; tau < upto; ++tau)
                code |= static_cast<std::uint64_t>(m.at(j, tau) & 1) << (j * upto + tau);
        return code;
    }

    const SignalModel& model_;
    const Network& net_;
    std::size_t T_, n_;
    std::map<std::tuple<std::size_t, std::size_t, std::uint64_t>, Action> memo_;
};

SignalMatrix matrix_from_code(std::size_t n, std::size_t T, std::uint64_t code) {
    SignalMatrix m(n, T);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t t = 0; t < T; ++t)
            m.at(j, t) = (code >> (j * T + t)) & 1;
    return m;
}

} // namespace

// doctest's Approx is relative by default; belief comparisons need absolute
// tolerance since the values pass through zero.
static void check_close(double x, double y, double tol) {
    CHECK(std::abs(x - y) <= tol);
}

static void check_beliefs_match(const TrajectoryRecord& a, const TrajectoryRecord& b,
                                double tol) {
    REQUIRE(a.n == b.n);
    REQUIRE(a.horizon == b.horizon);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t t = 0; t < a.horizon; ++t) {
            CAPTURE(i);
            CAPTURE(t);
            CHECK(a.action(i, t) == b.action(i, t));
            check_close(a.belief(i, t).L, b.belief(i, t).L, tol);
            check_close(a.belief(i, t).S, b.belief(i, t).S, tol);
            check_close(a.belief(i, t).P, b.belief(i, t).P, tol);
            check_close(a.belief(i, t).p, b.belief(i, t).p, tol);
        }
}

TEST_SUITE("engines") {
    TEST_CASE("first actions reveal first signals") {
        SignalModel m = make_symmetric_binary(0.9);
        for (auto topo : {Topology::complete, Topology::star, Topology::ring}) {
            Network net = make_topology(topo, 2);
            GenericEngine eng(m, net, 1);
            for (std::uint64_t code = 0; code < 4; ++code) {
                SignalMatrix mat = matrix_from_code(2, 1, code);
                TrajectoryRecord rec = eng.run(mat, State::g);
                for (std::size_t i = 0; i < 2; ++i) {
                    CHECK(rec.action(i, 0) == (mat.at(i, 0) == 0 ? Action::g : Action::b));
                    check_close(rec.belief(i, 0).S, 0.0, 1e-12); // no actions observed yet
                }
            }
        }
    }

    TEST_CASE("complete n=2 worked example at t=2") {
        // agent 1 saw own signals (g, b) and agent 2's first action g:
        // L = ln9 - ln9 + ln9 = ln9, action g.
        SignalModel m = make_symmetric_binary(0.9);
        Network net = make_topology(Topology::complete, 2);
        GenericEngine eng(m, net, 2);
        SignalMatrix mat(2, 2);
        mat.at(0, 0) = 0; // g
        mat.at(0, 1) = 1; // b
        mat.at(1, 0) = 0; // g  -> agent 2's first action is g
        mat.at(1, 1) = 1;
        TrajectoryRecord rec = eng.run(mat, State::g);
        check_close(rec.belief(0, 1).L, kLn9, 1e-9);
        CHECK(rec.action(0, 1) == Action::g);

        // both first actions g: S_2 = ln 81 for each agent
        SignalMatrix gg(2, 2);
        TrajectoryRecord rec2 = eng.run(gg, State::g);
        check_close(rec2.belief(0, 1).S, std::log(81.0), 1e-9);
        check_close(rec2.belief(1, 1).S, std::log(81.0), 1e-9);

        FactorizedCompleteEngine fac(m, net, 2);
        check_beliefs_match(rec, fac.run(mat, State::g), 1e-9);
        check_beliefs_match(rec2, fac.run(gg, State::g), 1e-9);
    }

    TEST_CASE("star center combines peripheral action paths") {
        SignalModel m = make_symmetric_binary(0.9);
        Network net = make_topology(Topology::star, 3);
        GenericEngine gen(m, net, 2);
        StarEngine star(m, net, 2);
        // everyone's signals: all g. At t=2 the center has seen three g
        // actions (its own and both peripherals') and holds two g signals:
        //   L = 2 ln9 (own) + 2 ln9 (peripheral paths) = 4 ln9
        //   S = 3 ln9 (outside observer of the three actions)
        //   P = own - own-path correction = ln9
        SignalMatrix mat(3, 2);
        TrajectoryRecord rec = gen.run(mat, State::g);
        check_close(rec.belief(0, 1).L, 4 * kLn9, 1e-9);
        check_close(rec.belief(0, 1).S, 3 * kLn9, 1e-9);
        check_close(rec.belief(0, 1).P, kLn9, 1e-9);
        check_beliefs_match(rec, star.run(mat, State::g), 1e-9);

        // center's own second signal b instead: L = 2 ln9 + 0 = ... own(g,b)=0
        SignalMatrix mat2 = mat;
        mat2.at(0, 1) = 1;
        TrajectoryRecord rec2 = gen.run(mat2, State::g);
        check_close(rec2.belief(0, 1).L, 2 * kLn9, 1e-9);
        check_beliefs_match(rec2, star.run(mat2, State::g), 1e-9);

        // peripherals: their own count LLR, and S equals their own-path term
        check_close(rec.belief(1, 1).L, 2 * kLn9, 1e-9);
        check_close(rec.belief(1, 1).S, kLn9, 1e-9); // path (g) after one action
        check_close(rec.belief(1, 1).P, kLn9, 1e-9);
    }

    TEST_CASE("generic engine agrees with the brute-force oracle") {
        for (double p : {0.9, 0.7}) {
            SignalModel m = make_symmetric_binary(p);
            for (auto topo : {Topology::complete, Topology::star, Topology::ring}) {
                const std::size_t n = 2, T = 3;
                Network net = make_topology(topo, n);
                GenericEngine eng(m, net, T);
                BruteOracle oracle(m, net, T);
                for (std::uint64_t code = 0; code < (std::uint64_t{1} << (n * T)); ++code) {
                    SignalMatrix mat = matrix_from_code(n, T, code);
                    TrajectoryRecord rec = eng.run(mat, State::g);
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t t = 1; t <= T; ++t) {
                            CAPTURE(code);
                            CAPTURE(i);
                            CAPTURE(t);
                            check_close(rec.belief(i, t - 1).L, oracle.posterior_llr(i, t, mat),
                                        1e-9);
                            check_close(rec.belief(i, t - 1).S, oracle.social_llr(i, t, mat),
                                        1e-9);
                            CHECK(rec.action(i, t - 1) == oracle.action(i, t, mat));
                        }
                }
            }
        }
    }

    TEST_CASE("oracle on a three-agent star") {
        SignalModel m = make_symmetric_binary(0.75);
        Network net = make_topology(Topology::star, 3);
        const std::size_t n = 3, T = 2;
        GenericEngine eng(m, net, T);
        BruteOracle oracle(m, net, T);
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << (n * T)); ++code) {
            SignalMatrix mat = matrix_from_code(n, T, code);
            TrajectoryRecord rec = eng.run(mat, State::b);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t t = 1; t <= T; ++t) {
                    check_close(rec.belief(i, t - 1).L, oracle.posterior_llr(i, t, mat), 1e-9);
                    check_close(rec.belief(i, t - 1).S, oracle.social_llr(i, t, mat), 1e-9);
                }
        }
    }

    TEST_CASE("engine equivalence: factorized and star vs generic") {
        for (double p : {0.6, 0.75, 0.9}) {
            SignalModel m = make_symmetric_binary(p);
            for (std::size_t n : {2u, 3u}) {
                const std::size_t T = 4;
                Network complete = make_topology(Topology::complete, n);
                Network star = make_topology(Topology::star, n);
                GenericEngine gen_c(m, complete, T);
                GenericEngine gen_s(m, star, T);
                FactorizedCompleteEngine fac(m, complete, T);
                StarEngine se(m, star, T);
                for (std::uint64_t code = 0; code < (std::uint64_t{1} << (n * T)); ++code) {
                    SignalMatrix mat = matrix_from_code(n, T, code);
                    check_beliefs_match(gen_c.run(mat, State::g), fac.run(mat, State::g), 1e-9);
                    check_beliefs_match(gen_s.run(mat, State::g), se.run(mat, State::g), 1e-9);
                }
            }
        }
    }

    TEST_CASE("autarky reduces to the single-agent count rule") {
        SignalModel m = make_symmetric_binary(0.9);
        Network net = make_topology(Topology::autarky, 1);
        const std::size_t T = 5;
        GenericEngine eng(m, net, T);
        for (std::uint64_t code = 0; code < (1u << T); ++code) {
            SignalMatrix mat = matrix_from_code(1, T, code);
            TrajectoryRecord rec = eng.run(mat, State::g);
            int count = 0;
            for (std::size_t t = 1; t <= T; ++t) {
                if (mat.at(0, t - 1) == 0) ++count;
                const double L = count * kLn9 - (static_cast<int>(t) - count) * kLn9;
                // majority rule with ties to g
                const Action expect = L > kTieEps    ? Action::g
                                      : L < -kTieEps ? Action::b
                                                     : Action::g;
                CHECK(rec.action(0, t - 1) == expect);
                check_close(rec.belief(0, t - 1).L, L, 1e-9);
            }
        }
    }

    TEST_CASE("decomposition and private-likelihood bound on every micro run") {
        SignalModel m = make_symmetric_binary(0.8);
        const double M = m.bound_M();
        for (auto topo : {Topology::complete, Topology::star, Topology::ring}) {
            const std::size_t n = 3, T = 3;
            Network net = make_topology(topo, n);
            GenericEngine eng(m, net, T);
            for (std::uint64_t code = 0; code < (std::uint64_t{1} << (n * T)); ++code) {
                SignalMatrix mat = matrix_from_code(n, T, code);
                TrajectoryRecord rec = eng.run(mat, State::g);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t t = 1; t <= T; ++t) {
                        const BeliefState& b = rec.belief(i, t - 1);
                        CHECK(std::abs(b.L - (b.S + b.P)) <= 1e-9);
                        CHECK(std::abs(b.P) <= M * static_cast<double>(t) + 1e-9);
                        CHECK(std::abs(b.L - std::log(b.p / (1.0 - b.p))) <= 1e-9);
                    }
            }
        }
    }

    TEST_CASE("state relabeling symmetry") {
        // Relabeling g <-> b mirrors the whole system only when the tie rule
        // is mirrored too: with the tie fixed at g, a count that falls
        // exactly on the indifference point resolves to g in both worlds, so
        // the mirrored world's action partition (and with it later belief
        // magnitudes) genuinely differs. With the tie rule flipped along
        // with the signals the mirror is exact at every period.
        SignalModel m = make_symmetric_binary(0.9);
        const std::size_t n = 2, T = 5;
        Network net = make_topology(Topology::complete, n);
        FactorizedCompleteEngine eng_g(m, net, T, TieRule{Action::g});
        FactorizedCompleteEngine eng_b(m, net, T, TieRule{Action::b});
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << (n * T)); ++code) {
            SignalMatrix mat = matrix_from_code(n, T, code);
            SignalMatrix flipped = mat;
            for (auto& s : flipped.data) s ^= 1;
            TrajectoryRecord a = eng_g.run(mat, State::g);
            TrajectoryRecord b = eng_b.run(flipped, State::b);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t t = 0; t < T; ++t) {
                    check_close(a.belief(i, t).L, -b.belief(i, t).L, 1e-9);
                    check_close(a.belief(i, t).S, -b.belief(i, t).S, 1e-9);
                    check_close(a.belief(i, t).P, -b.belief(i, t).P, 1e-9);
                    CHECK(a.action(i, t) != b.action(i, t));
                }
                // Same tie rule on both sides: mirror symmetry holds on the
                // first two periods, before any indifference point can enter
                // a consistency partition.
                TrajectoryRecord c = eng_g.run(flipped, State::b);
                for (std::size_t t = 0; t < 2; ++t) {
                    check_close(a.belief(i, t).L, -c.belief(i, t).L, 1e-9);
                    if (std::abs(a.belief(i, t).L) > 1e-12)
                        CHECK(a.action(i, t) != c.action(i, t));
                }
            }
        }
    }

    TEST_CASE("measurability: beliefs depend only on the information set") {
        // star: peripheral 2 never observes the center, so replacing the
        // center's signals must not move peripheral beliefs
        SignalModel m = make_symmetric_binary(0.9);
        Network net = make_topology(Topology::star, 3);
        const std::size_t T = 3;
        GenericEngine eng(m, net, T);
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << (3 * T)); ++code) {
            SignalMatrix mat = matrix_from_code(3, T, code);
            SignalMatrix alt = mat;
            for (std::size_t t = 0; t < T; ++t) alt.at(0, t) ^= 1; // scramble center
            TrajectoryRecord ra = eng.run(mat, State::g);
            TrajectoryRecord rb = eng.run(alt, State::g);
            for (std::size_t i = 1; i < 3; ++i)
                for (std::size_t t = 0; t < T; ++t) {
                    CHECK(ra.belief(i, t).L == rb.belief(i, t).L);
                    CHECK(ra.action(i, t) == rb.action(i, t));
                }
        }
    }

    TEST_CASE("measurability under history-preserving perturbation, ring") {
        // ring n=3: agent 1 observes {1, 3}. Whenever two matrices give
        // agent 1 the same own signals and the same observed actions, its
        // recorded beliefs must coincide exactly.
        SignalModel m = make_symmetric_binary(0.75);
        Network net = make_topology(Topology::ring, 3);
        const std::size_t n = 3, T = 3;
        GenericEngine eng(m, net, T);
        std::map<std::tuple<std::uint64_t, std::uint64_t, std::size_t>, double> seen;
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << (n * T)); ++code) {
            SignalMatrix mat = matrix_from_code(n, T, code);
            TrajectoryRecord rec = eng.run(mat, State::g);
            for (std::size_t t = 1; t <= T; ++t) {
                std::uint64_t own = 0, hist = 0;
                for (std::size_t tau = 0; tau < t; ++tau) own |= std::uint64_t{mat.at(0, tau)} << tau;
                std::size_t bit = 0;
                for (std::size_t tau = 0; tau + 1 < t; ++tau)
                    for (auto j : net.neighbors(0))
                        hist |= std::uint64_t{rec.action(j, tau) == Action::g} << bit++;
                auto key = std::make_tuple(own, hist, t);
                auto [it, inserted] = seen.try_emplace(key, rec.belief(0, t - 1).L);
                if (!inserted) CHECK(it->second == rec.belief(0, t - 1).L);
            }
        }
    }

    TEST_CASE("uninformative signals: everything ties to g") {
        SignalModel m = make_symmetric_binary(0.5);
        Network net = make_topology(Topology::complete, 2);
        GenericEngine gen(m, net, 3);
        FactorizedCompleteEngine fac(m, net, 3);
        SignalMatrix mat = matrix_from_code(2, 3, 0b101100);
        for (const TrajectoryRecord& rec : {gen.run(mat, State::b), fac.run(mat, State::b)}) {
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t t = 0; t < 3; ++t) {
                    CHECK(rec.action(i, t) == Action::g);
                    CHECK(rec.is_tied(i, t));
                    check_close(rec.belief(i, t).L, 0.0, 1e-12);
                }
        }
    }

    TEST_CASE("alternative tie rule: engines stay equivalent") {
        TieRule tie{Action::b};
        SignalModel m = make_symmetric_binary(0.9);
        Network net = make_topology(Topology::complete, 2);
        const std::size_t T = 4;
        GenericEngine gen(m, net, T, kDefaultEnumBudget, tie);
        FactorizedCompleteEngine fac(m, net, T, tie);
        const double M = m.bound_M();
        for (std::uint64_t code = 0; code < (1u << (2 * T)); ++code) {
            SignalMatrix mat = matrix_from_code(2, T, code);
            TrajectoryRecord a = gen.run(mat, State::g);
            check_beliefs_match(a, fac.run(mat, State::g), 1e-9);
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t t = 1; t <= T; ++t)
                    CHECK(std::abs(a.belief(i, t - 1).P) <= M * t + 1e-9);
        }
    }

    TEST_CASE("exact forward: two independent exact routes agree") {
        for (double p : {0.6, 0.9}) {
            SignalModel m = make_symmetric_binary(p);
            for (std::size_t n : {2u, 3u}) {
                const std::size_t T = n == 2 ? 5 : 4;
                Network net = make_topology(Topology::complete, n);
                MistakeCurve a = GenericEngine(m, net, T).exact_forward();
                MistakeCurve b = FactorizedCompleteEngine(m, net, T).exact_forward();
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t t = 0; t < T; ++t)
                        for (auto c : {Conditioning::unconditional, Conditioning::given_g,
                                       Conditioning::given_b}) {
                            CAPTURE(p);
                            CAPTURE(i);
                            CAPTURE(t);
                            check_close(a.p_hat(c, i, t), b.p_hat(c, i, t), 1e-10);
                        }
            }
        }
    }

    TEST_CASE("exact forward at t=1 is the single-signal error") {
        SignalModel m = make_symmetric_binary(0.9);
        Network net = make_topology(Topology::complete, 2);
        MistakeCurve c = FactorizedCompleteEngine(m, net, 5).exact_forward();
        CHECK(c.p_hat(Conditioning::unconditional, 0, 0) == doctest::Approx(0.1).epsilon(1e-10));
        CHECK(c.p_hat(Conditioning::unconditional, 1, 0) == doctest::Approx(0.1).epsilon(1e-10));
    }

    TEST_CASE("resource errors") {
        SignalModel m = make_symmetric_binary(0.9);
        Network big = make_topology(Topology::complete, 4);
        CHECK_THROWS_AS(GenericEngine(m, big, 6), ResourceError);
        try {
            GenericEngine eng(m, big, 6);
        } catch (const ResourceError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("n=4") != std::string::npos);
            CHECK(msg.find("T=6") != std::string::npos);
            CHECK(msg.find("|Omega|=2") != std::string::npos);
        }
        Network tiny = make_topology(Topology::complete, 2);
        CHECK_THROWS_AS(GenericEngine(m, tiny, 3, /*budget=*/10), ResourceError);
        CHECK_THROWS_AS(FactorizedCompleteEngine(m, tiny, 70).exact_forward(), ResourceError);
        CHECK_THROWS_AS(FactorizedCompleteEngine(m, tiny, 12).exact_forward(/*node_budget=*/4),
                        ResourceError);
    }

    TEST_CASE("engine preconditions") {
        SignalModel m = make_symmetric_binary(0.9);
        Network ring = make_topology(Topology::ring, 3);
        CHECK_THROWS_AS(FactorizedCompleteEngine(m, ring, 3), ConfigError);
        CHECK_THROWS_AS(StarEngine(m, ring, 3), ConfigError);
        SignalTable t3;
        t3.alphabet = {"a", "b", "c"};
        t3.dist_g = {0.5, 0.3, 0.2};
        t3.dist_b = {0.2, 0.3, 0.5};
        SignalModel tri = SignalModel::stationary(t3);
        Network complete = make_topology(Topology::complete, 2);
        CHECK_THROWS_AS(FactorizedCompleteEngine(tri, complete, 3), ConfigError);
        CHECK_NOTHROW(GenericEngine(tri, complete, 3)); // generic handles any alphabet
    }

    TEST_CASE("unreachable information set is a hard error") {
        SignalModel m = make_symmetric_binary(0.9);
        Network net = make_topology(Topology::complete, 2);
        GenericEngine eng(m, net, 2);
        // agent 1 with own signals (g, g) but a history claiming its own
        // first action was b: impossible, since the first action follows the
        // first signal.
        InfoSetKey impossible{/*prefix=*/0, /*history=*/0b10}; // own bit 0 = b, other = g
        CHECK_THROWS_AS(eng.posterior_at(0, 2, impossible), std::logic_error);
        CHECK_NOTHROW(eng.posterior_at(0, 2, InfoSetKey{0, 0b11}));
    }

    TEST_CASE("non-stationary signals through the generic engine") {
        // period 1 is informative, period 2 is pure noise: the period-2
        // posterior must not move from the period-1 one except through the
        // other agent's first action
        SignalTable strong, noise;
        strong.alphabet = {"g", "b"};
        strong.dist_g = {0.9, 0.1};
        strong.dist_b = {0.1, 0.9};
        noise.alphabet = {"g", "b"};
        noise.dist_g = {0.5, 0.5};
        noise.dist_b = {0.5, 0.5};
        SignalModel m = SignalModel::grid({{strong, noise}, {strong, noise}});
        Network net = make_topology(Topology::complete, 2);
        GenericEngine eng(m, net, 2);
        SignalMatrix mat(2, 2); // all symbol 0
        TrajectoryRecord rec = eng.run(mat, State::g);
        check_close(rec.belief(0, 0).L, kLn9, 1e-9);
        check_close(rec.belief(0, 1).L, 2 * kLn9, 1e-9); // own s1 + other's action
        CHECK(m.bound_M() == doctest::Approx(2 * kLn9));
    }
}
