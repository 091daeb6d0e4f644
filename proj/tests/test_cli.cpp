#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "mist/dataset.hpp"
#include "mist/model.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result mist_cmd(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = mist::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// Fresh output root per test case; relative --out paths land here.
struct Sandbox {
  fs::path root;
  explicit Sandbox(const std::string& name) {
    root = fs::temp_directory_path() / "mist_cli_test" / name;
    fs::remove_all(root);
    fs::create_directories(root);
    setenv("MIST_OUTPUT_ROOT", root.c_str(), 1);
  }
  [[nodiscard]] std::string path(const std::string& rel) const { return (root / rel).string(); }
};

const std::vector<std::string> kTiny{"--set", "epochs=2", "--set", "hidden=12,12", "--set", "batch_size=40",
                                     "--set", "k0=5",     "--quiet"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("gen writes reproducible files and rejects bad arguments") {
  Sandbox box("gen");
  const Result r = mist_cmd({"gen", "two-rings", "--n", "500", "--noise", "0.01", "--factor", "0.35", "--seed", "1",
                             "--out", "rings.csv"});
  CHECK(r.code == 0);
  CHECK(r.out.find("n=500 d=2 C=2 balance=250/250") != std::string::npos);
  const std::string first = slurp(box.path("rings.csv"));
  CHECK(mist_cmd({"gen", "two-rings", "--n", "500", "--seed", "1", "--out", "again.csv"}).code == 0);
  CHECK(slurp(box.path("again.csv")) == first);
  const mist::Dataset d = mist::load_csv(box.path("rings.csv"));
  CHECK(d.size() == 500);

  CHECK(mist_cmd({"gen", "two-moons", "--n", "0", "--out", "x.csv"}).code == 1);
  CHECK(mist_cmd({"gen", "three-blobs", "--out", "x.csv"}).code == 1);
  CHECK(mist_cmd({"gen", "two-rings", "--factor", "1.5", "--out", "x.csv"}).code == 2);
  CHECK(mist_cmd({"frobnicate"}).code == 1);
  CHECK(mist_cmd({"--help"}).code == 0);
}

TEST_CASE("train writes a complete, replayable run directory") {
  Sandbox box("train");
  REQUIRE(mist_cmd({"gen", "two-moons", "--n", "200", "--seed", "2", "--out", "moons.csv"}).code == 0);
  const Result r = mist_cmd(with({"train", "--data", box.path("moons.csv"), "--seeds", "0,3", "--out", "run"}, kTiny));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("ACC mean(std) over 2 seed(s): ") != std::string::npos);

  const fs::path run = box.root / "run";
  for (const char* f : {"manifest.json", "config.txt", "summary.csv", "seed_0/metrics.csv", "seed_0/labels.csv",
                        "seed_0/model.ckpt", "seed_3/metrics.csv"}) {
    CHECK_MESSAGE(fs::exists(run / f), f);
  }
  const std::string metrics = slurp(run / "seed_0/metrics.csv");
  CHECK(metrics.rfind("epoch,step,r_vat,h_y,h_y_given_x,l_ps,l_ng,i_nce,i_nce_prime,total,acc\n", 0) == 0);
  CHECK(line_count(run / "seed_0/metrics.csv") == 1 + 2 * (200 / 40 + 1));
  CHECK(slurp(run / "seed_0/labels.csv").rfind("index,pred_label\n0,", 0) == 0);
  CHECK(line_count(run / "seed_0/labels.csv") == 201);

  const std::string manifest = slurp(run / "manifest.json");
  for (const char* key : {"\"command\"", "\"config\"", "\"dataset_hash\"", "\"seeds\"", "\"output_dir\"",
                          "\"tool_version\""}) {
    CHECK_MESSAGE(manifest.find(key) != std::string::npos, key);
  }

  const mist::Checkpoint ckpt = mist::load_checkpoint(run / "seed_0/model.ckpt");
  const mist::Dataset moons = mist::load_csv(box.path("moons.csv"));
  const mist::Labels again = mist::predict(ckpt.state, moons.features);
  std::ostringstream labels;
  labels << "index,pred_label\n";
  for (std::size_t i = 0; i < again.size(); ++i) labels << i << ',' << again[i] << '\n';
  CHECK(labels.str() == slurp(run / "seed_0/labels.csv"));

  // Replaying the saved config reproduces the metrics byte for byte.
  REQUIRE(mist_cmd({"train", "--data", box.path("moons.csv"), "--config", (run / "config.txt").string(), "--seeds",
                    "0", "--out", "replay", "--quiet"})
              .code == 0);
  CHECK(slurp(box.root / "replay/seed_0/metrics.csv") == metrics);

  // Existing run directories are protected.
  const Result again_run = mist_cmd(with({"train", "--data", box.path("moons.csv"), "--out", "run"}, kTiny));
  CHECK(again_run.code == 1);
  CHECK(again_run.err.find("--force") != std::string::npos);
  CHECK(slurp(run / "seed_0/metrics.csv") == metrics);
  CHECK(mist_cmd(with({"train", "--data", box.path("moons.csv"), "--out", "run", "--force"}, kTiny)).code == 0);
  CHECK_FALSE(fs::exists(run / "seed_3"));
}

TEST_CASE("train failures") {
  Sandbox box("train_fail");
  const Result missing = mist_cmd(with({"train", "--data", box.path("nope.csv"), "--out", "run"}, kTiny));
  CHECK(missing.code == 2);
  CHECK_FALSE(fs::exists(box.root / "run"));

  REQUIRE(mist_cmd({"gen", "two-moons", "--n", "100", "--out", "m.csv"}).code == 0);
  const Result bad = mist_cmd({"train", "--data", box.path("m.csv"), "--set", "beta=1.5", "--out", "run"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("beta") != std::string::npos);
  CHECK(mist_cmd({"train", "--data", box.path("m.csv"), "--set", "nokey=1", "--out", "run"}).code == 1);
  CHECK(mist_cmd({"train", "--data", box.path("m.csv"), "--set", "epochs", "--out", "run"}).code == 1);
  CHECK_FALSE(fs::exists(box.root / "run"));
}

TEST_CASE("plain variant logs both estimates") {
  Sandbox box("plain");
  REQUIRE(mist_cmd({"gen", "two-moons", "--n", "120", "--out", "m.csv"}).code == 0);
  REQUIRE(mist_cmd(with({"train", "--data", box.path("m.csv"), "--set", "variant=plain", "--out", "run"}, kTiny)).code ==
          0);
  std::ifstream in(box.root / "run/seed_0/metrics.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  REQUIRE(cells.size() >= 10);
  CHECK(std::stod(cells[7]) != 0.0);
  CHECK(std::stod(cells[8]) != 0.0);
}

TEST_CASE("eval with a labels file or K-means") {
  Sandbox box("eval");
  REQUIRE(mist_cmd({"gen", "two-moons", "--n", "100", "--out", "m.csv"}).code == 0);
  {
    std::ofstream out(box.root / "labels.csv");
    out << "index,pred_label\n";
    for (int i = 0; i < 100; ++i) out << i << ',' << (i < 50 ? 1 : 0) << '\n';
  }
  const Result r = mist_cmd({"eval", "--data", box.path("m.csv"), "--labels", box.path("labels.csv")});
  CHECK(r.code == 0);
  CHECK(r.out == "ACC 100.00\n");
  const Result k = mist_cmd({"eval", "--data", box.path("m.csv"), "--kmeans", "--out", "km.csv"});
  CHECK(k.code == 0);
  CHECK(k.out.rfind("ACC ", 0) == 0);
  CHECK(fs::exists(box.root / "km.csv"));
  CHECK(mist_cmd({"eval", "--data", box.path("m.csv")}).code == 1);
  {
    std::ofstream out(box.root / "short.csv");
    out << "index,pred_label\n0,1\n";
  }
  CHECK(mist_cmd({"eval", "--data", box.path("m.csv"), "--labels", box.path("short.csv")}).code == 2);
}

TEST_CASE("ablate and sweep tabulate mean(std)") {
  Sandbox box("tables");
  REQUIRE(mist_cmd({"gen", "two-rings", "--n", "150", "--out", "r.csv"}).code == 0);
  const Result a =
      mist_cmd(with({"ablate", "--data", box.path("r.csv"), "--combo", "BC", "--combo", "ABCD", "--seeds", "0,1",
                     "--out", "abl"},
                    kTiny));
  REQUIRE(a.code == 0);
  const std::string table = slurp(box.root / "abl/ablation.csv");
  CHECK(table.rfind("combo,mean,std,summary,accs\nBC,", 0) == 0);
  CHECK(table.find("\nABCD,") != std::string::npos);
  CHECK(fs::exists(box.root / "abl/combo_BC/seed_1/metrics.csv"));
  CHECK(mist_cmd(with({"ablate", "--data", box.path("r.csv"), "--combo", "AB", "--out", "abl2"}, kTiny)).code == 1);

  const Result s = mist_cmd(with({"sweep", "--data", box.path("r.csv"), "--axis", "k0", "--values", "5,7,10,12",
                                  "--seeds", "0", "--out", "sw"},
                                 kTiny));
  REQUIRE(s.code == 0);
  CHECK(line_count(box.root / "sw/sweep.csv") == 5);
  CHECK(slurp(box.root / "sw/sweep.csv").find("\nk0,12,") != std::string::npos);
  CHECK(mist_cmd(with({"sweep", "--data", box.path("r.csv"), "--axis", "k0", "--values", "", "--out", "sw2"}, kTiny))
            .code == 1);
  CHECK(mist_cmd(with({"sweep", "--data", box.path("r.csv"), "--axis", "lr", "--values", "1", "--out", "sw3"}, kTiny))
            .code == 1);
}

TEST_CASE("plot is deterministic and 2-D only") {
  Sandbox box("plot");
  REQUIRE(mist_cmd({"gen", "two-rings", "--n", "300", "--out", "r.csv"}).code == 0);
  REQUIRE(mist_cmd({"plot", "--data", box.path("r.csv"), "--out", "a.svg"}).code == 0);
  REQUIRE(mist_cmd({"plot", "--data", box.path("r.csv"), "--out", "b.svg"}).code == 0);
  const std::string svg = slurp(box.root / "a.svg");
  CHECK(svg == slurp(box.root / "b.svg"));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("label 0 (150)") != std::string::npos);
  CHECK(svg.find("label 1 (150)") != std::string::npos);

  {
    std::ofstream out(box.root / "d3.csv");
    out << "f0,f1,f2\n1,2,3\n4,5,6\n";
  }
  const Result r = mist_cmd({"plot", "--data", box.path("d3.csv"), "--out", "c.svg"});
  CHECK(r.code == 1);
  CHECK(r.err.find("2-D") != std::string::npos);
  {
    std::ofstream out(box.root / "short.csv");
    out << "index,pred_label\n0,1\n";
  }
  CHECK(mist_cmd({"plot", "--data", box.path("r.csv"), "--labels", box.path("short.csv"), "--out", "d.svg"}).code == 2);
}
