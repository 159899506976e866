#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "transient/config.hpp"
#include "transient/io.hpp"

using namespace transient;

namespace {

nlohmann::json fig1() {
  std::ifstream is(std::string(TRANSIENT_CONFIG_DIR) + "/fig1.json");
  return nlohmann::json::parse(is);
}

std::string error_of(const nlohmann::json& j) {
  try {
    parse_config(j);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Io, SeventeenDigits) {
  for (double v : {0.1, 1.0 / 3.0, 28.48, -1e-300, 6.02214076e23}) {
    const std::string s = io::format_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(io::format_label(2.731), "2.731");
  EXPECT_EQ(io::format_label(0.0), "0");
}

TEST(Io, CsvRoundTripAndAtomicWrite) {
  const auto dir = std::filesystem::temp_directory_path() / "transient_io_test";
  std::filesystem::create_directories(dir);
  io::CsvWriter w({"a", "b"});
  w.comment("hello");
  w.row({1.0 / 3.0, 2.0});
  w.row({-4.5, 1e-20});
  EXPECT_THROW(w.row({1.0}), InputError);
  const auto path = dir / "t.csv";
  w.save(path);
  const auto t = io::read_csv(path);
  ASSERT_EQ(t.columns, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], 1.0 / 3.0);
  EXPECT_EQ(t.rows[1][1], 1e-20);
  std::ifstream is(path);
  std::string first;
  std::getline(is, first);
  EXPECT_EQ(first, "# hello");
  // No temporary files left behind.
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1);
  std::filesystem::remove_all(dir);
}

TEST(Io, SnapshotCsv) {
  MomentumDistribution d{1.5, {1.0, 2.0}, {0.25, 0.75}};
  const std::string s = io::snapshot_csv(d).str();
  EXPECT_NE(s.find("t,p,density\n1.5,1,0.25\n1.5,2,0.75\n"), std::string::npos);
  EXPECT_EQ(s.rfind("# transient-scatter", 0), 0u);
}

TEST(Config, PresetsParse) {
  const auto c = parse_config(fig1());
  EXPECT_EQ(c.barrier.V0, 102.5);
  EXPECT_EQ(c.barrier.d, 2.5);
  EXPECT_EQ(c.barrier.m, 1.558023);
  EXPECT_EQ(c.packet.delta_x, 107.99);
  EXPECT_EQ(c.packet.p_c, 28.48);
  EXPECT_NEAR(c.packet.x0(), -50.0, 1e-12);
  EXPECT_EQ(c.hbar, 1.0);
  EXPECT_EQ(c.engine, Engine::Both);
  EXPECT_EQ(c.grid.grid.n, std::size_t{1} << 16);
  EXPECT_EQ(c.grid.dt, 1e-4);

  for (const char* name : {"fig5.json", "fig6.json"}) {
    std::ifstream is(std::string(TRANSIENT_CONFIG_DIR) + "/" + name);
    auto j = nlohmann::json::parse(is);
    EXPECT_EQ(j["barrier"]["V0"], 105.0);
    j["barrier"]["V0"] = 102.5;
    EXPECT_EQ(j, fig1()) << name << " differs from fig1.json in more than V0";
  }
}

TEST(Config, DefaultHbarComesFromUnits) {
  auto j = fig1();
  j.erase("hbar");
  j.erase("grid");
  j["packet"] = {{"delta_x", 1e-4}, {"p_c", 50.0}, {"x0", -1.0}};
  j["barrier"] = {{"V0", 1.0}, {"d", 0.01}, {"m", 1.0}};
  EXPECT_NEAR(parse_config(j).hbar, 0.005, 1e-15);
}

TEST(Config, ErrorsNameTheField) {
  auto j = fig1();
  j["barrier"]["m"] = -1.0;
  EXPECT_NE(error_of(j).find("barrier.m"), std::string::npos);

  j = fig1();
  j["barrier"]["V0"] = "high";
  EXPECT_NE(error_of(j).find("barrier.V0"), std::string::npos);

  j = fig1();
  j["engine"] = "quantum";
  EXPECT_NE(error_of(j).find("engine"), std::string::npos);

  j = fig1();
  j["engine"] = "analytic";
  EXPECT_NE(error_of(j).find("grid"), std::string::npos);

  j = fig1();
  j["grid"]["n"] = 1000;
  EXPECT_NE(error_of(j).find("grid.n"), std::string::npos);

  j = fig1();
  j["packet"]["alpha"] = 0.5;
  EXPECT_NE(error_of(j).find("packet.x0"), std::string::npos);

  j = fig1();
  j["packet"]["delta_x"] = 0.0;
  EXPECT_NE(error_of(j).find("packet.delta_x"), std::string::npos);

  j = fig1();
  j["hbar"] = -1.0;
  EXPECT_NE(error_of(j).find("hbar"), std::string::npos);

  j = fig1();
  j["units"] = nlohmann::json::object({{"e_u", 1.0}});
  EXPECT_NE(error_of(j).find("units.p_u"), std::string::npos);

  j = fig1();
  j["packet"]["x0"] = -5.0;  // overlaps the barrier
  EXPECT_FALSE(error_of(j).empty());

  EXPECT_THROW(load_config("/nonexistent/config.json"), InputError);
}

TEST(Config, ResolvedRecordsEverything) {
  const auto r = parse_config(fig1()).resolved();
  for (const char* key : {"units", "hbar", "barrier", "packet", "engine", "grid", "evolve", "gqmax"}) {
    EXPECT_TRUE(r.contains(key)) << key;
  }
}
