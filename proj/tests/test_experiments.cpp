#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "mlspin/config.hpp"
#include "mlspin/csv.hpp"
#include "mlspin/rng.hpp"

using namespace mlspin;

TEST_CASE("random stream determinism") {
    SECTION("same seed, same stream") {
        random_stream a(42), b(42);
        for (int i = 0; i < 100; i++) {
            CHECK(a.uniform() == b.uniform());
            CHECK(a.normal() == b.normal());
        }
    }

    SECTION("different seeds diverge") {
        random_stream a(1), b(2);
        int same = 0;
        for (int i = 0; i < 64; i++) same += (a.uniform() == b.uniform());
        CHECK(same == 0);
    }

    SECTION("uniform range and coverage") {
        random_stream r(7);
        double lo = 1, hi = 0;
        for (int i = 0; i < 10000; i++) {
            const double u = r.uniform();
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
            lo = std::min(lo, u);
            hi = std::max(hi, u);
        }
        CHECK(lo < 0.01);
        CHECK(hi > 0.99);
    }

    SECTION("normal moments") {
        random_stream r(123);
        const int n = 100000;
        double s1 = 0, s2 = 0, s4 = 0;
        for (int i = 0; i < n; i++) {
            const double x = r.normal();
            s1 += x;
            s2 += x * x;
            s4 += x * x * x * x;
        }
        CHECK(std::abs(s1 / n) < 0.02);            // mean 0, stderr ~ 0.003
        CHECK(s2 / n == Catch::Approx(1.0).margin(0.02));
        CHECK(s4 / n == Catch::Approx(3.0).margin(0.1));
    }
}

TEST_CASE("settings text parsing") {
    SECTION("sections, comments, and trailing comments") {
        const auto s = settings_text::parse("# header\n"
                                            "[grid]\n"
                                            "modes = 128   # small\n"
                                            "box = 80\n"
                                            "\n"
                                            "; another comment\n"
                                            "[charge]\n"
                                            "profile = quartic\n");
        CHECK(s.get_int("grid.modes", 0) == 128);
        CHECK(s.get_double("grid.box", 0) == 80.0);
        CHECK(s.get_string("charge.profile", "") == "quartic");
        CHECK(s.get_double("grid.absent", 7.5) == 7.5);
        CHECK(s.has("grid.modes"));
        CHECK_FALSE(s.has("grid.absent"));
    }

    SECTION("malformed input is rejected") {
        CHECK_THROWS_AS(settings_text::parse("[grid\nmodes = 1\n"), std::invalid_argument);
        CHECK_THROWS_AS(settings_text::parse("just words\n"), std::invalid_argument);
        CHECK_THROWS_AS(settings_text::parse("= 3\n"), std::invalid_argument);
        CHECK_THROWS_AS(settings_text::parse("key =\n"), std::invalid_argument);
        CHECK_THROWS_AS(settings_text::parse("[a]\nk = 1\nk = 2\n"), std::invalid_argument);
    }

    SECTION("type errors are rejected") {
        const auto s = settings_text::parse("[grid]\nmodes = twelve\nbox = 1x\n");
        CHECK_THROWS_AS(s.get_int("grid.modes", 0), std::invalid_argument);
        CHECK_THROWS_AS(s.get_double("grid.box", 0), std::invalid_argument);
    }

    SECTION("missing file") {
        CHECK_THROWS_AS(settings_text::load("/nonexistent/path.ini"), std::runtime_error);
    }
}

TEST_CASE("experiment configuration") {
    SECTION("defaults validate and hash stably") {
        experiment_config c;
        CHECK_NOTHROW(c.validate());
        const auto h = c.hash();
        CHECK(h == experiment_config{}.hash());
        experiment_config c2;
        c2.dt = 0.005;
        CHECK(c2.hash() != h);
        // output location does not change the identity of the results
        experiment_config c3;
        c3.out_dir = "elsewhere";
        CHECK(c3.hash() == h);
    }

    SECTION("overrides apply on top of defaults") {
        const auto s = settings_text::parse("[grid]\nmodes = 128\nbox = 120\n"
                                            "[time]\nt_max = 20\n[fits]\nwindow_hi = 20\n"
                                            "[freewave]\nt_max = 30\nwindow_hi = 30\n");
        const auto c = experiment_config::from(s);
        CHECK(c.modes == 128);
        CHECK(c.box == 120.0);
        CHECK(c.t_max == 20.0);
        CHECK(c.freewave_t_max == 30.0);
        CHECK(c.dt == 0.01);    // untouched default
    }

    SECTION("unknown keys are reported") {
        const auto s = settings_text::parse("[grid]\nmodse = 128\n");
        CHECK_THROWS_WITH(experiment_config::from(s),
                          Catch::Matchers::ContainsSubstring("grid.modse"));
    }

    SECTION("range violations are refused") {
        auto bad = [](const std::string& text) {
            return experiment_config::from(settings_text::parse(text));
        };
        CHECK_THROWS_AS(bad("[model]\ninertia = 0\n"), std::invalid_argument);
        CHECK_THROWS_AS(bad("[grid]\nmodes = 15\n"), std::invalid_argument);
        CHECK_THROWS_AS(bad("[charge]\nprofile = cubic\n"), std::invalid_argument);
        CHECK_THROWS_AS(bad("[fits]\nbeta_attract = 2.0\n"), std::invalid_argument);
        CHECK_THROWS_AS(bad("[freewave]\nbeta = 1.5\n"), std::invalid_argument);
        CHECK_THROWS_AS(bad("[resolvent]\nzeta_samples = 4\n"), std::invalid_argument);
    }

    SECTION("wave wrap-around is refused") {
        // fronts launched from the data reach the box boundary and return
        // into the weighted observation region before t_max
        const auto s = settings_text::parse("[time]\nt_max = 70\n[fits]\nwindow_hi = 70\n");
        CHECK_THROWS_WITH(experiment_config::from(s),
                          Catch::Matchers::ContainsSubstring("wrap-around"));
        // a bigger box restores admissibility
        const auto s2 = settings_text::parse(
            "[grid]\nbox = 240\n[time]\nt_max = 70\n[fits]\nwindow_hi = 70\n");
        CHECK_NOTHROW(experiment_config::from(s2));
    }

    SECTION("data radius tracks the active envelopes") {
        experiment_config c;    // momentum-only default
        const double base = c.data_radius();
        c.width_lambda = 9.0;    // inactive while a = 0
        CHECK(c.data_radius() == base);
        c.data_a = 0.5;    // now the wide envelope counts
        CHECK(c.data_radius() > base);
    }
}

TEST_CASE("csv and summary emission") {
    SECTION("csv header carries schema version and config hash") {
        const std::string path = "test_out.csv";
        {
            csv_writer w(path, "attract", 0xabcdef0123456789ull, {"t", "omega"});
            w.row({1.0, 2.5});
            w.row({2.0, -0.5});
            CHECK_THROWS_AS(w.row({1.0}), std::invalid_argument);
        }
        std::ifstream in(path);
        std::string l1, l2, l3, l4;
        std::getline(in, l1);
        std::getline(in, l2);
        std::getline(in, l3);
        std::getline(in, l4);
        CHECK(l1 == "# mlspin-csv v1 experiment=attract config=abcdef0123456789");
        CHECK(l2 == "t,omega");
        CHECK(l3 == "1.0000000000000000e+00,2.5000000000000000e+00");
        CHECK(l4 == "2.0000000000000000e+00,-5.0000000000000000e-01");
        std::remove(path.c_str());
    }

    SECTION("identical rows serialize to identical bytes") {
        auto emit = [](const std::string& path) {
            csv_writer w(path, "x", 1, {"a", "b", "c"});
            for (int i = 0; i < 20; i++)
                w.row({std::sqrt(2.0) * i, std::exp(-0.3 * i), double(i) / 3});
        };
        emit("det_a.csv");
        emit("det_b.csv");
        std::ifstream a("det_a.csv"), b("det_b.csv");
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str() == sb.str());
        CHECK(sa.str().size() > 100);
        std::remove("det_a.csv");
        std::remove("det_b.csv");
    }

    SECTION("summary aggregates pass/fail") {
        summary_writer s;
        s.set("alpha.exponent", -2.0031);
        s.set("alpha.pass", true);
        s.set("beta.pass", true);
        CHECK(s.all_passed());
        s.set("beta.pass", false);
        CHECK_FALSE(s.all_passed());
        s.write("test_summary.txt");
        std::ifstream in("test_summary.txt");
        std::stringstream ss;
        ss << in.rdbuf();
        CHECK(ss.str().find("alpha.exponent = -2.0031") != std::string::npos);
        CHECK(ss.str().find("beta.pass = fail") != std::string::npos);
        std::remove("test_summary.txt");
    }
}
