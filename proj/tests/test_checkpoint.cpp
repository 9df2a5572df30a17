#include <catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>

#include "support.hpp"

using namespace hydrolim;
using namespace hydrolim::testing;

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hydrolim_checkpoint_tests";
  fs::create_directories(dir);
  return dir / name;
}

double coeff_diff(const CfState& a, const CfState& b) {
  double m = 0.0;
  const std::array<std::pair<const SpectralField*, const SpectralField*>, 4> pairs{
      {{&a.sigma, &b.sigma}, {&a.v1, &b.v1}, {&a.v2, &b.v2}, {&a.w, &b.w}}};
  for (const auto& [x, y] : pairs)
    for (std::size_t i = 0; i < x->coeffs().size(); ++i) m = std::max(m, std::abs(x->coeffs()[i] - y->coeffs()[i]));
  return m;
}

}  // namespace

TEST_CASE("Checkpoint round trip", "[checkpoint]") {
  const Grid g(8, 12, 16);
  CfState s = random_state(g, 3, 0.07, 5);
  s.time = 0.123456789;
  const fs::path path = scratch("roundtrip.hlim");
  checkpoint_write(s, path);
  CHECK(fs::file_size(path) == CheckpointData::header_size + 4 * 8 * g.physical_size());

  const CheckpointData d = checkpoint_read_data(path);
  const CheckpointData orig = CheckpointData::from_state(s);
  CHECK(d.nx == 8);
  CHECK(d.ny == 12);
  CHECK(d.nz == 16);
  CHECK(std::memcmp(&d.epsilon, &s.epsilon, sizeof(double)) == 0);
  CHECK(std::memcmp(&d.time, &s.time, sizeof(double)) == 0);
  for (int i = 0; i < 4; ++i) {
    REQUIRE(d.fields[i].size() == orig.fields[i].size());
    CHECK(std::memcmp(d.fields[i].data(), orig.fields[i].data(), 8 * d.fields[i].size()) == 0);
  }
  CHECK(d.encode() == orig.encode());

  const CfState back = checkpoint_read(path);
  CHECK(back.grid() == g);
  CHECK(back.sigma.parity() == Parity::even);
  CHECK(back.w.parity() == Parity::odd);
  CHECK(coeff_diff(back, s) <= 1e-15);
}

TEST_CASE("Corrupt checkpoints are rejected with an offset", "[checkpoint]") {
  const CfState s = random_state(Grid(8), 2, 0.1, 9);
  const auto bytes = CheckpointData::from_state(s).encode();

  SECTION("bad magic") {
    auto b = bytes;
    b[1] = 'X';
    try {
      CheckpointData::decode(b);
      FAIL("expected LoadError");
    } catch (const LoadError& e) {
      CHECK(e.offset() == 0);
    }
  }
  SECTION("wrong version") {
    auto b = bytes;
    b[4] = 9;
    try {
      CheckpointData::decode(b);
      FAIL("expected LoadError");
    } catch (const LoadError& e) {
      CHECK(e.offset() == 4);
    }
  }
  SECTION("truncated payload") {
    std::vector<unsigned char> b(bytes.begin(), bytes.end() - 100);
    try {
      CheckpointData::decode(b);
      FAIL("expected LoadError");
    } catch (const LoadError& e) {
      CHECK(e.offset() == b.size());
    }
  }
  SECTION("truncated header") {
    std::vector<unsigned char> b(bytes.begin(), bytes.begin() + 10);
    CHECK_THROWS_AS(CheckpointData::decode(b), LoadError);
  }
  SECTION("trailing bytes") {
    auto b = bytes;
    b.push_back(0);
    CHECK_THROWS_AS(CheckpointData::decode(b), LoadError);
  }
  SECTION("missing file") { CHECK_THROWS_AS(checkpoint_read(scratch("does_not_exist.hlim")), LoadError); }
}

TEST_CASE("Resuming from checkpoints reproduces the uninterrupted run", "[checkpoint]") {
  const Grid g(16);
  const CpeState cpe = default_cpe_initial(g);
  StepperConfig cfg;
  cfg.dt = 1e-3;

  CfState straight = make_well_prepared_ic(cpe, 0.1, 1.0);
  CfIntegrator it(g, 0.1, cfg);
  for (int i = 0; i < 20; ++i) {
    if (i == 9) checkpoint_write(straight, scratch("previous.hlim"));
    it.advance(straight);
    if (i == 9) checkpoint_write(straight, scratch("current.hlim"));
  }

  CfState resumed = checkpoint_read(scratch("current.hlim"));
  CfIntegrator it2(g, 0.1, cfg);
  it2.prime(checkpoint_read(scratch("previous.hlim")));
  for (int i = 10; i < 20; ++i) it2.advance(resumed);

  CHECK(resumed.time == Catch::Approx(straight.time).margin(1e-15));
  CHECK(coeff_diff(resumed, straight) <= 1e-14);
}
