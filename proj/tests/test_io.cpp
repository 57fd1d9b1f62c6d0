#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "crflow/commands.hpp"
#include "crflow/config.hpp"
#include "crflow/errors.hpp"
#include "crflow/presets.hpp"
#include "crflow/snapshot.hpp"
#include "crflow/verify.hpp"
#include "doctest.h"

using namespace crflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("crflow_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<char> bytes_of(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string text_of(const fs::path& p) {
    std::stringstream ss;
    ss << std::ifstream(p).rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("snapshot layout and round trip") {
    const fs::path dir = scratch("snap");
    Grid grid;
    grid.n = {8, 9, 10};
    grid.period = {1.0, 2.0, 0.5};
    grid.order = 4;
    const SymTensorField h = random_smooth_tensor(grid, 3);
    write_snapshot((dir / "h.snap").string(), h, {{"field", "metric"}});

    const std::vector<char> b = bytes_of(dir / "h.snap");
    REQUIRE(b.size() == 64 + 8 * 9 * 10 * 6 * 8);
    CHECK(std::memcmp(b.data(), "CRFLOWSN", 8) == 0);
    auto u32 = [&](std::size_t o) { std::uint32_t v; std::memcpy(&v, b.data() + o, 4); return v; };
    auto f64 = [&](std::size_t o) { double v; std::memcpy(&v, b.data() + o, 8); return v; };
    CHECK(u32(8) == 1);
    CHECK(u32(12) == 8);
    CHECK(u32(16) == 9);
    CHECK(u32(20) == 10);
    CHECK(f64(32) == 2.0);
    CHECK(u32(48) == 6);
    CHECK(u32(52) == 4);
    for (std::size_t o = 56; o < 64; ++o) CHECK(b[o] == 0);
    // Component c of point q sits at 64 + (q*6 + c)*8.
    const std::size_t q = grid.index(3, 4, 5);
    CHECK(f64(64 + (q * 6 + 4) * 8) == h[q](1, 2));

    const SymTensorField back = read_tensor_snapshot((dir / "h.snap").string());
    CHECK(back.grid.n == grid.n);
    for (std::size_t n = 0; n < h.size(); ++n) CHECK(back[n].c == h[n].c);
    CHECK(read_snapshot_meta((dir / "h.snap").string()).at("field") == "metric");
    CHECK_THROWS_AS(read_scalar_snapshot((dir / "h.snap").string()), ConfigError);

    const ScalarField f = random_smooth_scalar(grid, 4);
    write_snapshot((dir / "f.snap").string(), f);
    CHECK(read_scalar_snapshot((dir / "f.snap").string()).data == f.data);

    std::ofstream((dir / "bad.snap").string(), std::ios::binary) << "NOTASNAPSHOT";
    CHECK_THROWS_AS(read_snapshot_header((dir / "bad.snap").string()), ConfigError);
    fs::resize_file(dir / "f.snap", fs::file_size(dir / "f.snap") - 8);
    CHECK_THROWS_AS(read_scalar_snapshot((dir / "f.snap").string()), ConfigError);
}

TEST_CASE("config parsing diagnostics") {
    const auto doc = parse_config("# comment\n[grid]\nn = 16\norder = 2 ; trailing\n\n[integrator]\ndt = cfl\n");
    CHECK(doc.at("grid.n").value == "16");
    CHECK(doc.at("grid.order").line == 4);
    const RunConfig c = interpret_config(doc, "flow");
    CHECK(c.grid.n[2] == 16);
    CHECK(c.grid.order == 2);

    auto line_of = [](const std::string& text) {
        try {
            interpret_config(parse_config(text), "flow");
        } catch (const ConfigError& e) {
            return std::pair(e.line, e.field);
        }
        return std::pair(-1, std::string());
    };
    CHECK(line_of("[grid]\nn = 16\nbogus = 1\n") == std::pair(3, std::string("grid.bogus")));
    CHECK(line_of("[grid]\n\norder = 3\n") == std::pair(3, std::string("grid.order")));
    CHECK(line_of("[elliptic]\ntolerance = -1\n") == std::pair(2, std::string("elliptic.tolerance")));
    CHECK(line_of("[integrator]\nscheme = leapfrog\n") == std::pair(2, std::string("integrator.scheme")));
    CHECK(line_of("[grid]\nn = 4\n") == std::pair(2, std::string("grid.n")));
    CHECK_THROWS_AS(parse_config("[grid]\nn = 1\nn = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid\n"), ConfigError);
}

TEST_CASE("canonical config round-trips to the same hash") {
    ConfigDocument doc = parse_config("[grid]\nn = 12\n[integrator]\nscheme = strang\n");
    apply_override(doc, "run.seed=99");
    const RunConfig a = interpret_config(doc, "flow");
    const std::string text = canonical_config(a);
    const RunConfig b = interpret_config(parse_config(text), "flow");
    CHECK(canonical_config(b) == text);
    CHECK(sha256_hex(text) == sha256_hex(canonical_config(b)));
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK_THROWS_AS(interpret_config(parse_config(text), "verify"), ConfigError);
}

TEST_CASE("verify suite: determinism and negative control") {
    VerifyOptions opt;
    const VerifyReport a = run_verify(opt);
    CHECK(a.passed);
    CHECK(run_verify(opt).text() == a.text());
    opt.convention_sign = -1.0;
    const VerifyReport bad = run_verify(opt);
    CHECK_FALSE(bad.passed);
    const std::string f = bad.failures();
    CHECK(f.find("contracted_bianchi") != std::string::npos);
    CHECK(f.find("adjointness") != std::string::npos);
}

TEST_CASE("subcommand drivers") {
    const fs::path dir = scratch("cli");
    std::ostringstream log;
    ConfigDocument doc = parse_config("[grid]\nn = 12\norder = 2\n[metric]\npreset = near-flat\n");
    apply_override(doc, "run.output=" + (dir / "n1").string());
    RunConfig c = interpret_config(doc, "normalize");
    REQUIRE(run_command(c, log) == exit_ok);

    // Normalizing a normalized metric is a fixed point.
    apply_override(doc, "run.output=" + (dir / "n2").string());
    apply_override(doc, "metric.input=" + (dir / "n1" / "metric.snap").string());
    c = interpret_config(doc, "normalize");
    REQUIRE(run_command(c, log) == exit_ok);
    const SymTensorField g1 = read_tensor_snapshot((dir / "n1" / "metric.snap").string());
    const SymTensorField g2 = read_tensor_snapshot((dir / "n2" / "metric.snap").string());
    for (std::size_t n = 0; n < g1.size(); ++n)
        for (int s = 0; s < 6; ++s) CHECK(g2[n].c[s] == doctest::Approx(g1[n].c[s]).epsilon(1e-10));
    CHECK(text_of(dir / "n2" / "manifest.txt").find("config_sha256 = ") != std::string::npos);

    // Homogeneous CSV: scalar curvature column strictly increasing.
    ConfigDocument h = parse_config("[homogeneous]\nmodel = nil\nhorizon = 5\n");
    apply_override(h, "run.output=" + (dir / "hom").string());
    REQUIRE(run_command(interpret_config(h, "homogeneous"), log) == exit_ok);
    std::ifstream csv(dir / "hom" / "classical.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line.rfind("# crflow", 0) == 0);
    std::getline(csv, line);
    CHECK(line == "t,s,A,B,C,R,vol");
    double prev = -1e300;
    int rows = 0;
    while (std::getline(csv, line)) {
        std::stringstream ss(line);
        std::string cell;
        for (int k = 0; k < 6; ++k) std::getline(ss, cell, ',');
        const double r = std::stod(cell);
        CHECK(r > prev);
        prev = r;
        ++rows;
    }
    CHECK(rows > 10);

    // Errors map to exit codes.
    ConfigDocument bad = parse_config("[metric]\npreset = sphere\n");
    apply_override(bad, "run.output=" + (dir / "bad").string());
    CHECK(run_command(interpret_config(bad, "normalize"), log) == exit_config);
    ConfigDocument solver = parse_config("[grid]\nn = 12\n[elliptic]\nmax_iterations = 1\n");
    apply_override(solver, "run.output=" + (dir / "solver").string());
    CHECK(run_command(interpret_config(solver, "normalize"), log) == exit_solver);
}
