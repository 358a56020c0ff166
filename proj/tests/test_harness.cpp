#include "ddstc/harness.hpp"

#include "ddstc/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

using namespace ddstc;
using namespace ddstc::harness;

namespace {

SimConfig quick_config()
{
    SimConfig c;
    c.subcarriers = 16;
    c.min_errors = 50;
    c.min_streams = 64;
    c.max_bits = 200'000;
    c.streams_per_batch = 32;
    c.seed = 7;
    return c;
}

std::string csv_of(std::span<const BerPoint> pts)
{
    std::ostringstream os;
    write_ber_csv(os, pts);
    return os.str();
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("defaults")
{
    const SimConfig c;
    CHECK(c.schemes == std::vector<Scheme>{Scheme::proposed});
    CHECK(c.subcarriers == 64);
    CHECK(c.cp_len == 1);
    CHECK(c.beta == 0.9);
    CHECK(c.doppler == 1e-3);
    CHECK(c.source_fraction == 0.5);
    CHECK(c.relay_fraction == 0.25);
    CHECK(c.min_errors == 200);
    CHECK(c.max_bits == 2'000'000);
    CHECK_NOTHROW(validate(c));

    const auto f = fig6_defaults();
    CHECK(f.schemes.size() == 3);
    CHECK(f.taus == std::vector<double>{0.0, 0.2, 0.4, 0.6, 0.8, 1.0});
}

TEST_CASE("key = value text with comments and overrides")
{
    SimConfig c;
    apply_text(c, "# sweep\n"
                  "scheme = proposed, conventional\n"
                  "n=32\n"
                  "  tau = 0.2,0.8  \n"
                  "snr-db = 5, 10\n"
                  "split = 0.6,0.2\n"
                  "\n"
                  "noiseless = true\n"
                  "constellation = qpsk\n"
                  "fading-timebase = symbol\n");
    CHECK(c.schemes == std::vector<Scheme>{Scheme::proposed, Scheme::conventional});
    CHECK(c.subcarriers == 32);
    CHECK(c.taus == std::vector<double>{0.2, 0.8});
    CHECK(c.snr_db == std::vector<double>{5.0, 10.0});
    CHECK(c.source_fraction == 0.6);
    CHECK(c.relay_fraction == 0.2);
    CHECK(c.noiseless);
    CHECK(c.modulation == modem::Modulation::qpsk);
    CHECK(c.timebase == FadingTimebase::symbol);

    apply_setting(c, "n", "8");
    CHECK(c.subcarriers == 8);
}

TEST_CASE("bad settings are configuration errors")
{
    SimConfig c;
    CHECK_THROWS_AS(apply_setting(c, "bogus", "1"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "n", "ten"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "n", "-3"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "beta", "0.9x"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "split", "0.5"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "scheme", "magic"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "constellation", "64qam"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "noiseless", "maybe"), ConfigError);
    CHECK_THROWS_AS(apply_text(c, "n 4\n"), ConfigError);
}

TEST_CASE("validation")
{
    const auto bad = [](auto edit) {
        SimConfig c;
        edit(c);
        return c;
    };
    CHECK_THROWS_AS(validate(bad([](SimConfig& c) { c.delay_int = 1; })), ConfigError);
    CHECK_NOTHROW(validate(bad([](SimConfig& c) {
        c.delay_int = 1;
        c.cp_len = 2;
    })));
    CHECK_THROWS_AS(validate(bad([](SimConfig& c) {
                        c.delay_int = 1;
                        c.cp_len = 2;
                        c.schemes = {Scheme::conventional};
                    })),
                    ConfigError);
    CHECK_THROWS_AS(validate(bad([](SimConfig& c) { c.taus = {1.5}; })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](SimConfig& c) { c.taus.clear(); })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](SimConfig& c) { c.snr_db.clear(); })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](SimConfig& c) { c.schemes.clear(); })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](SimConfig& c) { c.beta = 1.2; })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](SimConfig& c) { c.cp_len = 65; })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](SimConfig& c) { c.modulation = modem::Modulation::qam16; })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](SimConfig& c) { c.blocks_per_stream = 1; })), ConfigError);

    SimConfig c = quick_config();
    CHECK_THROWS_AS(run_point(c, Scheme::coherent, 0.4, 10.0), ConfigError);
    c.cp_len = 0;
    CHECK_THROWS_AS(run_point(c, Scheme::proposed, 0.0, 10.0), ConfigError);
}

TEST_CASE("text rendering round trip")
{
    SimConfig c = fig6_defaults();
    c.seed = 123456789012345ULL;
    c.beta = 0.35;
    c.doppler = 2.5e-4;
    c.snr_db = {0.5, 7.25};
    c.out = "result.csv";
    SimConfig back;
    apply_text(back, to_text(c));
    CHECK(to_text(back) == to_text(c));
    CHECK(back.seed == c.seed);
    CHECK(back.beta == c.beta);
    CHECK(back.snr_db == c.snr_db);
    CHECK(back.out == c.out);
    CHECK(config_keys().size() == 24);
}

TEST_CASE("configuration files")
{
    const auto path = std::filesystem::temp_directory_path() / "ddstc_test_config.txt";
    {
        std::ofstream out(path);
        out << "n = 128\nseed = 99\n";
    }
    SimConfig c;
    apply_file(c, path);
    CHECK(c.subcarriers == 128);
    CHECK(c.seed == 99);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(apply_file(c, path), IoError);
}

}

TEST_SUITE("harness") {

TEST_CASE("point statistics")
{
    BerPoint p;
    p.add({10, 1});
    p.add({10, 3});
    p.finalize();
    CHECK(p.payload_bits == 20);
    CHECK(p.bit_errors == 4);
    CHECK(p.ber == doctest::Approx(0.2));
    CHECK(p.ci95 == doctest::Approx(1.96 * std::sqrt(0.2 * 0.8 / 20)));
    // Residuals e - p b are -1 and +1: sqrt(2 * 2 / 1) / 20.
    CHECK(p.clustered_se() == doctest::Approx(0.1));

    BerPoint a, b;
    a.payload_bits = b.payload_bits = 10000;
    a.bit_errors = 120;
    b.bit_errors = 80;
    a.finalize();
    b.finalize();
    CHECK(two_proportion_z(a, b) == doctest::Approx(0.004 / std::sqrt(0.01 * 0.99 * 2e-4)));
    CHECK(two_proportion_z(a, a) == 0.0);
}

TEST_CASE("curve helpers")
{
    std::vector<BerPoint> curve;
    for (double db : {10.0, 20.0, 30.0}) {
        BerPoint p;
        p.p_over_n0_db = db;
        p.ber = std::pow(10.0, -2.0 * db / 10.0);
        curve.push_back(p);
    }
    CHECK(diversity_slope(curve, 10.0, 30.0) == doctest::Approx(-2.0));
    CHECK(snr_at_ber(curve, 1e-3) == doctest::Approx(15.0));
    CHECK(snr_at_ber(curve, 1e-4) == doctest::Approx(20.0));
    CHECK(std::isnan(snr_at_ber(curve, 1e-9)));
    CHECK(std::isnan(diversity_slope(curve, 40.0, 50.0)));
}

TEST_CASE("seed derivation is collision-free")
{
    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1'000'000; ++i) {
        seen.insert(derive_seed(42, i));
    }
    CHECK(seen.size() == 1'000'000);

    std::unordered_set<std::uint64_t> points;
    for (auto s : {Scheme::proposed, Scheme::conventional, Scheme::coherent}) {
        for (double tau : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
            for (double db : {10.0, 15.0, 20.0, 25.0, 30.0}) {
                points.insert(point_seed(1, s, tau, db));
            }
        }
    }
    CHECK(points.size() == 90);
}

TEST_CASE("Doppler per block")
{
    SimConfig c;
    CHECK(doppler_per_block(c, Scheme::proposed) == 1e-3);
    c.timebase = FadingTimebase::symbol;
    CHECK(doppler_per_block(c, Scheme::proposed) == doctest::Approx(1e-3 * (2 * 64 + 2 * 65)));
    CHECK(doppler_per_block(c, Scheme::conventional) == doctest::Approx(4e-3));
}

TEST_CASE("stop rule")
{
    SimConfig c = quick_config();
    const auto p = run_point(c, Scheme::proposed, 0.0, 5.0);
    CHECK(p.bit_errors >= c.min_errors);
    CHECK(p.streams >= c.min_streams);
    CHECK(p.streams % c.streams_per_batch == 0);
    CHECK(p.ber == doctest::Approx(static_cast<double>(p.bit_errors) / static_cast<double>(p.payload_bits)));
    CHECK(p.ci95 / p.ber < 0.15);

    c.min_errors = 1'000'000;
    c.max_bits = 50'000;
    const auto capped = run_point(c, Scheme::conventional, 0.0, 30.0);
    CHECK(capped.payload_bits >= 50'000);
    CHECK(capped.payload_bits < 50'000 + c.streams_per_batch * 2 * (c.blocks_per_stream - 1));
}

TEST_CASE("worker count does not change results")
{
    SimConfig c = quick_config();
    for (auto scheme : {Scheme::proposed, Scheme::conventional, Scheme::coherent}) {
        c.workers = 1;
        const auto one = run_point(c, scheme, 0.0, 12.0);
        c.workers = 8;
        const auto eight = run_point(c, scheme, 0.0, 12.0);
        const auto serial = run_point_serial(c, scheme, 0.0, 12.0);
        CHECK(one.bit_errors == eight.bit_errors);
        CHECK(one.payload_bits == eight.payload_bits);
        CHECK(one.sum_err_sq == eight.sum_err_sq);
        CHECK(serial.bit_errors == one.bit_errors);
        CHECK(serial.payload_bits == one.payload_bits);
    }
    c.schemes = {Scheme::proposed, Scheme::coherent};
    c.taus = {0.0, 0.5};
    c.snr_db = {8.0, 14.0};
    c.workers = 1;
    const auto a = run_sweep(c);
    c.workers = 8;
    const auto b = run_sweep(c);
    CHECK(csv_of(a) == csv_of(b));
    // Coherent runs only at tau = 0.
    CHECK(a.size() == 2 * 2 + 2);
}

TEST_CASE("zero noise gives zero errors for the proposed scheme")
{
    SimConfig c = quick_config();
    c.noiseless = true;
    c.max_bits = 20'000;
    for (double tau : {0.0, 0.3, 0.5, 1.0}) {
        const auto p = run_point(c, Scheme::proposed, tau, 30.0);
        CHECK(p.payload_bits >= 20'000);
        CHECK(p.bit_errors == 0);
    }
}

TEST_CASE("single-subcarrier proposed chain matches the conventional scheme without delay")
{
    SimConfig c;
    c.subcarriers = 1;
    c.min_errors = 1'000'000;
    c.max_bits = 100'000;
    c.min_streams = 1;
    c.seed = 3;
    const auto prop = run_point(c, Scheme::proposed, 0.0, 10.0);
    const auto conv = run_point(c, Scheme::conventional, 0.0, 10.0);
    CHECK(prop.payload_bits >= 100'000);
    CHECK(std::abs(two_proportion_z_clustered(prop, conv)) < 3.0);
}

TEST_CASE("BER CSV round trip")
{
    SimConfig c = quick_config();
    c.snr_db = {6.0};
    const auto pts = run_sweep(c);
    const auto text = csv_of(pts);
    CHECK(text.rfind("scheme,tau_over_Ts,p_over_n0_db,payload_bits,bit_errors,ber,ci95\n", 0) == 0);
    std::istringstream in(text);
    const auto back = read_ber_csv(in);
    REQUIRE(back.size() == pts.size());
    CHECK(back[0].bit_errors == pts[0].bit_errors);
    CHECK(back[0].payload_bits == pts[0].payload_bits);
    CHECK(back[0].ber == doctest::Approx(pts[0].ber).epsilon(1e-8));
    CHECK(csv_of(back) == text);

    std::istringstream wrong("a,b,c\n");
    CHECK_THROWS_AS(read_ber_csv(wrong), IoError);
    std::istringstream short_row("scheme,tau_over_Ts,p_over_n0_db,payload_bits,bit_errors,ber,ci95\nproposed,0,1\n");
    CHECK_THROWS_AS(read_ber_csv(short_row), IoError);
    std::istringstream bad_num(
        "scheme,tau_over_Ts,p_over_n0_db,payload_bits,bit_errors,ber,ci95\nproposed,0,1,x,1,0.1,0.01\n");
    CHECK_THROWS_AS(read_ber_csv(bad_num), IoError);
}

}
