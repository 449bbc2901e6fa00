// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "vovit/wav.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  args.insert(args.begin(), "vovit");
  const int code = vovit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("vovit_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"eval"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("end-to-end workflow") {
  TempDir dir;
  REQUIRE(cli({"synth", "--dir", dir.path.string(), "--seconds", "1"}).code == 0);

  SUBCASE("eval of a reference against itself is capped") {
    const auto r = cli({"eval", "--est", dir / "voice1.wav", "--ref", dir / "voice1.wav", "--ref", dir / "voice2.wav"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["capped"].get<bool>());
    CHECK(j["sdr_db"].get<double>() == 100.0);
  }

  SUBCASE("mix and oracle") {
    CHECK(cli({"mix", "--s1", dir / "voice1.wav", "--s2", dir / "voice2.wav", "--out", dir / "m.wav"}).code == 0);
    // Voices went through float32 files, so compare at that precision.
    const auto a = vovit::wav::read(dir / "m.wav"), b = vovit::wav::read(dir / "mix.wav");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.samples[i] == doctest::Approx(b.samples[i]).epsilon(1e-6).scale(1.0));
    const auto r = cli({"oracle", "--s1", dir / "voice1.wav", "--s2", dir / "voice2.wav"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["sdr_db"].get<double>() > 30.0);
  }

  SUBCASE("separate with r = 0 matches the stage-1 output byte for byte") {
    const auto init = cli({"init-weights", "--seed", "9", "--out", dir / "w.vvwa"});
    REQUIRE(init.code == 0);
    CHECK(nlohmann::json::parse(init.out)["checksum"].get<std::string>().size() == 16);
    const auto r = cli({"separate", "--mix", dir / "mix.wav", "--landmarks", dir / "face1.json", "--weights",
                        dir / "w.vvwa", "--r", "0", "--out", dir / "r0.wav", "--stage1-out", dir / "s1.wav",
                        "--emit-diagnostics", dir / "diag.json"});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "r0.wav") == slurp(dir / "s1.wav"));
    const auto diag = nlohmann::json::parse(slurp(dir / "diag.json"));
    CHECK(diag["enhancer_passes"].get<int>() == 0);

    // Same request again: byte-identical file.
    REQUIRE(cli({"separate", "--mix", dir / "mix.wav", "--landmarks", dir / "face1.json", "--weights", dir / "w.vvwa",
                 "--out", dir / "a.wav"})
                .code == 0);
    REQUIRE(cli({"separate", "--mix", dir / "mix.wav", "--landmarks", dir / "face1.json", "--weights", dir / "w.vvwa",
                 "--out", dir / "b.wav"})
                .code == 0);
    CHECK(slurp(dir / "a.wav") == slurp(dir / "b.wav"));
  }

  SUBCASE("errors are JSON on stderr") {
    const auto r = cli({"separate", "--mix", dir / "missing.wav", "--landmarks", dir / "face1.json", "--weights",
                        dir / "none.vvwa", "--out", dir / "x.wav"});
    CHECK(r.code == 1);
    const auto j = nlohmann::json::parse(r.err);
    CHECK(j["error"]["code"].get<std::string>() == "io_error");
    CHECK(j["error"].contains("message"));

    const auto bad = cli({"separate", "--mix", dir / "mix.wav", "--oracle-bypass", "--out", dir / "x.wav"});
    CHECK(bad.code == 1);
    CHECK(nlohmann::json::parse(bad.err)["error"]["code"].get<std::string>() == "invalid_argument");
  }
}

TEST_CASE("gradcheck passes") {
  const auto r = cli({"gradcheck"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["pass"].get<bool>());
}
