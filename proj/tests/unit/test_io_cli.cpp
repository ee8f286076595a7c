#include <filesystem>
#include <fstream>
#include <sstream>

#include "dnsurf/cli.hpp"
#include "dnsurf/io.hpp"
#include "unit_util.hpp"

using namespace dnsurf;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("dnsurf_unit_" + std::to_string(::getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path workdir() {
  static const TempDir dir;
  return dir.path;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

std::string slurp(const std::string& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Result {
  int code;
  std::string out, err;
  json report() const { return json::parse(out); }
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dnsurf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::string& disk_file() {
  static const std::string p = [] {
    const auto r = run_cli({"forward", "disk-z-z2", "--n", "256", "--out", path("disk.json")});
    EXPECT_EQ(r.code, 0) << r.err;
    return path("disk.json");
  }();
  return p;
}

}  // namespace

TEST(DatasetIo, RoundTripIsByteIdentical) {
  DatasetFile f;
  f.data = dnsurf::test::dataset("two-disks", 64);
  f.meta = json{{"id", "two-disks"}, {"note", 1}};
  write_dataset(path("a.json"), f, true);
  const auto back = read_dataset(path("a.json"));
  write_dataset(path("b.json"), back, true);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(back.data.curve.size(), 2u);
  EXPECT_EQ(back.data.theta[1][1][5], f.data.theta[1][1][5]);
}

TEST(DatasetIo, MissingFIsRecomputed) {
  DatasetFile f;
  f.data = dnsurf::test::dataset("disk-z-z2", 64);
  const auto back = dataset_from_json(dataset_to_json(f, false));
  for (std::size_t k = 0; k < 64; ++k) EXPECT_LT(std::abs(back.data.f[1][0][k] - f.data.f[1][0][k]), 1e-13);
}

TEST(DatasetIo, MalformedInputIsParseError) {
  EXPECT_DNSURF_ERROR(dataset_from_json(json::object()), errc::parse);
  EXPECT_DNSURF_ERROR(dataset_from_json(json{{"components", json::array({json{{"n", 16}}})}}), errc::parse);
  DatasetFile f;
  f.data = dnsurf::test::dataset("disk-z-z2", 64);
  auto j = dataset_to_json(f);
  j["components"][0]["orientation"] = 3;
  EXPECT_DNSURF_ERROR(dataset_from_json(j), errc::parse);
  j = dataset_to_json(f);
  j["components"][0]["u"][0].erase(0);
  EXPECT_DNSURF_ERROR(dataset_from_json(j), errc::parse);
}

TEST(DatasetIo, BadGridIsRejected) {
  DatasetFile f;
  f.data = dnsurf::test::dataset("disk-z-z2", 64);
  auto j = dataset_to_json(f);
  j["components"][0]["n"] = 63;
  EXPECT_DNSURF_ERROR(dataset_from_json(j), errc::invalid_grid);
}

TEST(SeriesIo, RoundTrip) {
  Series2 s(5);
  for (int i = 0; i <= 5; ++i)
    for (int j = 0; i + j <= 5; ++j) s.at(i, j) = cplx(0.1 * i - 0.3, 1.0 / (1 + j));
  const auto back = series_from_json(json::parse(series_to_json(s).dump()));
  EXPECT_EQ(back.order(), 5);
  EXPECT_EQ((back - s).max_abs(), 0.0);
  auto j = series_to_json(s);
  j["coeffs"][2].erase(0);
  EXPECT_DNSURF_ERROR(series_from_json(j), errc::parse);
}

TEST(Cli, ForwardWritesDatasetAndTruth) {
  disk_file();
  const auto truth = json::parse(slurp(path("disk.truth.json")));
  EXPECT_EQ(truth["p"], 2);
  EXPECT_EQ(truth["index_p_minus_q"], 2);
  EXPECT_EQ(read_dataset(disk_file()).data.curve[0].n, 256u);
}

TEST(Cli, UnknownScenarioExitsTwo) {
  EXPECT_EQ(run_cli({"forward", "nope", "--out", path("nope.json")}).code, 2);
  EXPECT_EQ(run_cli({"bogus"}).code, 2);
}

TEST(Cli, ReconstructFindsTwoSheets) {
  const auto r = run_cli({"reconstruct", disk_file(), "--scenario", "disk-z-z2", "--threads", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = r.report();
  EXPECT_EQ(rep["p"], 2);
  EXPECT_EQ(rep["points"], 100);
  EXPECT_LT(rep["residuals"]["implicit"].get<double>(), 1e-6);
}

TEST(Cli, ReconstructIsDeterministic) {
  const auto a = run_cli({"reconstruct", disk_file(), "--seed", "7", "--threads", "2", "--json", path("c1.json")});
  const auto b = run_cli({"reconstruct", disk_file(), "--seed", "7", "--threads", "1", "--json", path("c2.json")});
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(path("c1.json")), slurp(path("c2.json")));
}

TEST(Cli, CharacterizeDiskPole) {
  ASSERT_EQ(run_cli({"forward", "disk-pole", "--out", path("pole.json")}).code, 0);
  const auto r = run_cli({"characterize", path("pole.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = r.report();
  EXPECT_EQ(rep["verdict"], "decomposed");
  EXPECT_EQ(rep["p"], 1);
}

TEST(Cli, CharacterizeDiskIsAffine) {
  const auto r = run_cli({"characterize", disk_file()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["verdict"], "excluded-affine");
}

TEST(Cli, CheckPassesOnExactData) {
  const auto r = run_cli({"check", disk_file(), "--scenario", "disk-z-z2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["result"], "pass");
}

TEST(Cli, GreenWithoutScenarioExitsFour) {
  EXPECT_EQ(run_cli({"check", disk_file(), "--green"}).code, 4);
  EXPECT_EQ(run_cli({"check", disk_file(), "--points", "4"}).code, 4);
}

TEST(Cli, MissingFileExitsTwo) {
  EXPECT_EQ(run_cli({"reconstruct", path("does_not_exist.json")}).code, 2);
}
