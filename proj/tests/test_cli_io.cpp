#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "rdpp/config.hpp"
#include "rdpp/errors.hpp"
#include "rdpp/manifest.hpp"

using rdpp::Config;

TEST_CASE("config parses pairs, comments and blank lines") {
  const Config cfg = Config::from_string(
      "# a comment\n"
      "epochs = 30\n"
      "\n"
      "lr=0.05   # trailing comment\n"
      "mode =  rdpp\n"
      "seed=42\n"
      "greedy_baseline = true\n");
  CHECK(cfg.get_int("epochs", 0) == 30);
  CHECK(cfg.get_double("lr", 0.0) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(cfg.get_string("mode", "") == "rdpp");
  CHECK(cfg.get_u64("seed", 0) == 42);
  CHECK(cfg.get_bool("greedy_baseline", false));
  CHECK(cfg.has("lr"));
  CHECK_FALSE(cfg.has("missing"));
}

TEST_CASE("config getters fall back when a key is absent") {
  const Config cfg = Config::from_string("");
  CHECK(cfg.get_int("epochs", 7) == 7);
  CHECK(cfg.get_double("lr", 0.125) == 0.125);
  CHECK(cfg.get_string("mode", "scst") == "scst");
  CHECK(cfg.get_bool("flag", true));
}

TEST_CASE("config rejects malformed lines with their location") {
  CHECK_THROWS_WITH_AS(Config::from_string("novalue\n", "conf"),
                       doctest::Contains("conf:1"), rdpp::ConfigError);
  CHECK_THROWS_WITH_AS(Config::from_string("a=1\n=bad\n", "conf"),
                       doctest::Contains("conf:2"), rdpp::ConfigError);
}

TEST_CASE("config getters validate the stored text strictly") {
  const Config cfg = Config::from_string(
      "epochs = 12x\n"
      "lr = fast\n"
      "seed = -1\n"
      "flag = maybe\n");
  CHECK_THROWS_AS(cfg.get_int("epochs", 0), rdpp::ConfigError);
  CHECK_THROWS_AS(cfg.get_double("lr", 0.0), rdpp::ConfigError);
  CHECK_THROWS_AS(cfg.get_u64("seed", 0), rdpp::ConfigError);
  CHECK_THROWS_AS(cfg.get_bool("flag", false), rdpp::ConfigError);
}

TEST_CASE("config loads from a file and reports missing paths") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rdpp-test-config";
  fs::create_directories(dir);
  const std::string path = (dir / "run.cfg").string();
  {
    std::ofstream out(path);
    out << "m = 5\nmode = scst\n";
  }
  const Config cfg = Config::from_file(path);
  CHECK(cfg.get_int("m", 0) == 5);
  CHECK(cfg.entries().size() == 2);
  CHECK_THROWS_AS(Config::from_file((dir / "absent.cfg").string()),
                  rdpp::ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("manifest serializes the full reproducibility record") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rdpp-test-manifest";
  fs::create_directories(dir);
  const std::string path = (dir / "run.manifest.json").string();

  rdpp::Manifest m;
  m.command = "train-rl";
  m.config = {{"mode", "rdpp"}, {"m", "5"}};
  m.seed = 1234567890123456789ULL;
  m.corpus_hash = 0xdeadbeefcafef00dULL;
  m.outputs = {"out.ckpt", "out.log.csv"};
  rdpp::write_manifest(m, path);

  std::ifstream in(path);
  const nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j.at("format_version").get<int>() == 1);
  CHECK(j.at("command").get<std::string>() == "train-rl");
  CHECK(j.at("config").at("mode").get<std::string>() == "rdpp");
  CHECK(j.at("seed").get<std::string>() == "1234567890123456789");
  CHECK(j.at("corpus_hash").get<std::string>() == "deadbeefcafef00d");
  CHECK(j.at("outputs").size() == 2);
  CHECK_FALSE(j.contains("timestamp"));

  // Writing the same manifest twice produces identical bytes.
  const std::string path2 = (dir / "again.manifest.json").string();
  rdpp::write_manifest(m, path2);
  std::ifstream f1(path), f2(path2);
  const std::string b1((std::istreambuf_iterator<char>(f1)), {});
  const std::string b2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(b1 == b2);

  fs::remove_all(dir);
}
