#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string cli = ROUGHSIG_CLI;
const std::string scenarios = std::string(ROUGHSIG_SOURCE_DIR) + "/scenarios/";

fs::path workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "roughsig_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const fs::path log = workdir() / "stdout.txt";
  const std::string cmd = env + " '" + cli + "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::ostringstream s;
  s << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, s.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << text;
  return p;
}

std::string small(const std::string& extra) {
  return "[scenario]\nname = small\n[mesh]\nnx_per_period = 8\nny = 4\n" + extra;
}

struct DumpLine {
  long id;
  double jump, mult;
  int active;
};

std::vector<DumpLine> read_dump(const fs::path& p) {
  std::ifstream in(p);
  std::vector<DumpLine> out;
  DumpLine d;
  while (in >> d.id >> d.jump >> d.mult >> d.active) out.push_back(d);
  return out;
}

void write_dump(const fs::path& p, const std::vector<DumpLine>& lines) {
  std::ofstream out(p);
  out.precision(17);
  for (const auto& d : lines) out << d.id << ' ' << d.jump << ' ' << d.mult << ' ' << d.active << '\n';
}

}  // namespace

TEST_CASE("cell subcommand") {
  const auto out = (workdir() / "cell").string();
  auto r = run("cell --config '" + scenarios + "case_a.ini' --out '" + out + "'");
  CHECK(r.code == 0);
  CHECK(r.out.find("A0_11 1") != std::string::npos);
  CHECK(r.out.find("regime A") != std::string::npos);
  CHECK(r.out.find("bounds certified") != std::string::npos);
  CHECK(fs::exists(fs::path(out) / "case_a_cell.txt"));

  r = run("cell --config '" + scenarios + "case_c.ini' --out '" + out + "'");
  CHECK(r.code == 0);
  CHECK(r.out.find("no effective conductance") != std::string::npos);
  CHECK(r.out.find("regime C") != std::string::npos);

  const auto layered = write_file("layered.ini", small("[coefficient]\npreset = layered\n"));
  r = run("cell --config '" + layered.string() + "' --out '" + out + "'");
  CHECK(r.code == 0);
  CHECK(r.out.find("A0_11 1.73") != std::string::npos);
  CHECK(r.out.find("A0_22 2") != std::string::npos);
}

TEST_CASE("solve-eps dumps pass verify and tampered dumps fail") {
  const fs::path out = workdir() / "solve";
  const std::string config = "--config '" + scenarios + "case_a.ini'";
  auto r = run("solve-eps " + config + " --eps 1/8 --out '" + out.string() + "'");
  REQUIRE(r.code == 0);
  const fs::path field = out / "case_a_eps1_8_field.txt";
  const fs::path pairs = out / "case_a_eps1_8_pairs.txt";
  REQUIRE(fs::exists(field));
  REQUIRE(fs::exists(pairs));
  CHECK(fs::exists(out / "case_a_eps1_8_mesh.txt"));

  r = run("verify '" + field.string() + "' '" + pairs.string() + "' " + config + " --eps 1/8");
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);

  auto lines = read_dump(pairs);
  REQUIRE(!lines.empty());
  auto negated = lines;
  for (auto& d : negated)
    if (d.jump > 1e-6) {
      d.jump = -d.jump;
      break;
    }
  const fs::path bad_jump = workdir() / "negated_pairs.txt";
  write_dump(bad_jump, negated);
  CHECK(run("verify '" + field.string() + "' '" + bad_jump.string() + "' " + config + " --eps 1/8").code == 1);

  auto perturbed = lines;
  for (auto& d : perturbed)
    if (d.active) {
      d.mult += 0.5;
      break;
    }
  const fs::path bad_mult = workdir() / "perturbed_pairs.txt";
  write_dump(bad_mult, perturbed);
  CHECK(run("verify '" + field.string() + "' '" + bad_mult.string() + "' " + config + " --eps 1/8").code == 1);

  CHECK(run("verify '" + (workdir() / "nope.txt").string() + "' '" + pairs.string() + "' " + config + " --eps 1/8").code == 4);

  // Identical inputs give identical bytes.
  const fs::path again = workdir() / "solve_again";
  REQUIRE(run("solve-eps " + config + " --eps 1/8 --out '" + again.string() + "'").code == 0);
  CHECK(slurp(field) == slurp(again / "case_a_eps1_8_field.txt"));
  CHECK(slurp(pairs) == slurp(again / "case_a_eps1_8_pairs.txt"));
}

TEST_CASE("zero load and zero conductance") {
  const fs::path out = workdir() / "zero";
  const auto zero_f = write_file("zero_f.ini", small("[source]\npreset = constant\nc = 0\n"));
  REQUIRE(run("solve-eps --config '" + zero_f.string() + "' --eps 1/4 --out '" + out.string() + "'").code == 0);
  std::ifstream in(out / "small_eps1_4_field.txt");
  std::string line;
  long values = 0;
  double worst = 0.0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    long id;
    double v;
    if (ls >> id >> v) {
      worst = std::max(worst, std::abs(v));
      ++values;
    }
  }
  CHECK(values > 0);
  CHECK(worst == 0.0);

  const auto zero_h = write_file("zero_h.ini", small("[conductance]\nzero = true\n[exponents]\ngamma = -3/2\n"));
  const auto r = run("solve-eps --config '" + zero_h.string() + "' --eps 1/4 --out '" + out.string() + "'");
  CHECK(r.code == 0);
  CHECK(r.out.find("interface coupling: empty") != std::string::npos);
}

TEST_CASE("output directory precedence") {
  const auto cfg = write_file("outdir.ini", small("[output]\ndir = " + (workdir() / "from_config").string() + "\n"));
  const fs::path env_dir = workdir() / "from_env", flag_dir = workdir() / "from_flag";
  CHECK(run("cell --config '" + cfg.string() + "'").code == 0);
  CHECK(fs::exists(workdir() / "from_config" / "small_cell.txt"));
  CHECK(run("cell --config '" + cfg.string() + "'", "ROUGHSIG_OUT_DIR='" + env_dir.string() + "'").code == 0);
  CHECK(fs::exists(env_dir / "small_cell.txt"));
  CHECK(run("cell --config '" + cfg.string() + "' --out '" + flag_dir.string() + "'",
            "ROUGHSIG_OUT_DIR='" + env_dir.string() + "'").code == 0);
  CHECK(fs::exists(flag_dir / "small_cell.txt"));
}

TEST_CASE("validation errors exit with 2") {
  const auto bad_eps = write_file("bad_eps.ini", small("[sweep]\neps = 1/4, 2/5, 1/8\n"));
  auto r = run("sweep --config '" + bad_eps.string() + "'");
  CHECK(r.code == 2);
  CHECK(r.out.find("sweep.eps") != std::string::npos);

  const auto one_eps = write_file("one_eps.ini", small("[sweep]\neps = 1/4\n"));
  r = run("sweep --config '" + one_eps.string() + "'");
  CHECK(r.code == 2);
  CHECK(r.out.find("sweep needs >= 3") != std::string::npos);

  CHECK(run("sweep --config '" + scenarios + "case_a.ini' --threads 0").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("solve-eps --config '" + scenarios + "case_a.ini'").code == 2);
  CHECK(run("solve-eps --config '" + scenarios + "case_a.ini' --eps 2/5").code == 2);
  CHECK(run("cell --config '" + (workdir() / "absent.ini").string() + "'").code == 4);
}

TEST_CASE("solver failures exit with 3") {
  const auto capped = write_file("capped.ini", small("[solver]\nmax_iter = 1\n[source]\nreverse_beyond = 0.5\n"));
  const auto r = run("solve-eps --config '" + capped.string() + "' --eps 1/4 --out '" + (workdir() / "capped").string() + "'");
  CHECK(r.code == 3);
}

TEST_CASE("small sweep passes and writes its report") {
  const fs::path out = workdir() / "sweep";
  const auto cfg = write_file("sweep.ini", small("[sweep]\neps = 1/2, 1/4, 1/8\n[source]\nc = 0\n"));
  const auto r = run("sweep --config '" + cfg.string() + "' --threads 2 --out '" + out.string() + "'");
  CHECK(r.code == 0);
  CHECK(fs::exists(out / "small.csv"));
  CHECK(fs::exists(out / "small_error.svg"));
  CHECK(fs::exists(out / "small_jump.svg"));
}
