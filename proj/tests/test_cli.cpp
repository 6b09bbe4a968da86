// End-to-end checks of the relay binary: exit codes, stream separation,
// CSV formats, and run-to-run determinism.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#ifndef RELAY_CLI_PATH
#error "RELAY_CLI_PATH must point at the relay binary"
#endif
#ifndef RELAY_TEST_DATA_DIR
#error "RELAY_TEST_DATA_DIR must point at the schedule fixtures"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("relay_cli_tests_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out_file = scratch_dir() / ("out" + std::to_string(counter));
  const fs::path err_file = scratch_dir() / ("err" + std::to_string(counter));
  ++counter;

  const std::string command = std::string(RELAY_CLI_PATH) + " " + args +
                              " > " + out_file.string() + " 2> " +
                              err_file.string();
  const int status = std::system(command.c_str());

  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

std::string data_file(const char* name) {
  return (fs::path(RELAY_TEST_DATA_DIR) / name).string();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// Splits a CSV row; fixture prompts never need quoting.
std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

TEST_CASE("validate echoes the normalized schedule") {
  const RunResult r = run_cli("validate " + data_file("two_segments.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.err.empty());
  CHECK(r.out.find("midpoint 2.5") != std::string::npos);
  CHECK(r.out.find("midpoint 8.5") != std::string::npos);
  CHECK(r.out.find("half_length 2.5") != std::string::npos);
}

TEST_CASE("validate reports structural errors on the diagnostic stream") {
  const RunResult overlap =
      run_cli("validate " + data_file("overlap.json"));
  CHECK(overlap.exit_code == 2);
  CHECK(overlap.out.empty());
  CHECK(overlap.err.find("overlap at frame 6") != std::string::npos);

  const RunResult gap = run_cli("validate " + data_file("gap.json"));
  CHECK(gap.exit_code == 2);
  CHECK(gap.err.find("gap at frame 5") != std::string::npos);

  const RunResult empty = run_cli("validate " + data_file("empty.json"));
  CHECK(empty.exit_code == 2);
  CHECK(empty.err.find("empty schedule") != std::string::npos);

  const RunResult unknown =
      run_cli("validate " + data_file("unknown_field.json"));
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.err.find("fps") != std::string::npos);

  const RunResult missing = run_cli("validate /nonexistent/schedule.json");
  CHECK(missing.exit_code == 2);
}

TEST_CASE("curves produces the decay CSV with exact endpoints") {
  const RunResult r = run_cli("curves --L 8 --epsilon 0.1");
  CHECK(r.exit_code == 0);
  const std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(!lines.empty());
  CHECK(lines[0] == "offset,retained_fraction");
  REQUIRE(lines.size() == 482);  // header + 481 grid points

  bool saw_zero = false, saw_plus_end = false, saw_minus_end = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = fields_of(lines[i]);
    REQUIRE(fields.size() == 2);
    const double offset = std::stod(fields[0]);
    const double fraction = std::stod(fields[1]);
    if (offset == 0.0) {
      saw_zero = true;
      CHECK(fields[1] == "1");
    }
    if (fields[0] == "8") {
      saw_plus_end = true;
      CHECK(std::abs(fraction - 0.1) <= 1e-12);
    }
    if (fields[0] == "-8") {
      saw_minus_end = true;
      CHECK(std::abs(fraction - 0.1) <= 1e-12);
    }
  }
  CHECK(saw_zero);
  CHECK(saw_plus_end);
  CHECK(saw_minus_end);
}

TEST_CASE("curves honors explicit windows and rejects degenerate ones") {
  const RunResult flat = run_cli("curves --L 8 --window 6");
  CHECK(flat.exit_code == 0);
  for (std::size_t i = 1; i < lines_of(flat.out).size(); ++i) {
    const auto fields = fields_of(lines_of(flat.out)[i]);
    const double offset = std::stod(fields[0]);
    if (std::abs(offset) <= 6.0) {
      CHECK(fields[1] == "1");
    }
  }

  const RunResult degenerate = run_cli("curves --L 1 --window 2");
  CHECK(degenerate.exit_code == 2);
  CHECK(degenerate.out.empty());
  CHECK(degenerate.err.find("window") != std::string::npos);

  const RunResult bad_window = run_cli("curves --L 8 --window sideways");
  CHECK(bad_window.exit_code == 2);

  const RunResult bad_eps = run_cli("curves --L 8 --epsilon 1.5");
  CHECK(bad_eps.exit_code == 2);
  CHECK(bad_eps.err.find("epsilon") != std::string::npos);
}

TEST_CASE("curves sweeps emit one labeled column per setting") {
  const RunResult by_window = run_cli("curves --L 8 --sweep-w");
  CHECK(by_window.exit_code == 0);
  CHECK(lines_of(by_window.out)[0] == "offset,w=0,w=4,w=6");

  const RunResult by_epsilon = run_cli("curves --L 8 --sweep-eps");
  CHECK(by_epsilon.exit_code == 0);
  CHECK(lines_of(by_epsilon.out)[0] == "offset,eps=0.3,eps=0.1,eps=0.01");

  const RunResult both = run_cli("curves --L 8 --sweep-w --sweep-eps");
  CHECK(both.exit_code == 2);
}

TEST_CASE("penalty emits the dense matrix; OFF mode is all zeros") {
  const RunResult off = run_cli("penalty " + data_file("two_segments.json") +
                                " --mode off --tokens-per-frame 1 "
                                "--tokens-per-prompt 2");
  CHECK(off.exit_code == 0);
  const std::vector<std::string> lines = lines_of(off.out);
  REQUIRE(lines.size() == 12);  // one row per query token
  for (const std::string& line : lines) {
    CHECK(line == "0,0,0,0");
  }

  const RunResult hard = run_cli("penalty " + data_file("two_segments.json") +
                                 " --mode hard --tokens-per-frame 1 "
                                 "--tokens-per-prompt 1");
  CHECK(hard.exit_code == 0);
  const std::vector<std::string> hard_lines = lines_of(hard.out);
  CHECK(hard_lines[0] == "0,inf");
  CHECK(hard_lines[11] == "inf,0");
}

TEST_CASE("occupancy in hard mode is one-hot over segment interiors") {
  const RunResult r = run_cli("occupancy " + data_file("two_segments.json") +
                              " --mode hard --profile uniform");
  CHECK(r.exit_code == 0);
  const std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 13);
  CHECK(lines[0] == "frame,A,B");
  for (std::size_t f = 0; f < 12; ++f) {
    const auto fields = fields_of(lines[f + 1]);
    REQUIRE(fields.size() == 3);
    CHECK(fields[0] == std::to_string(f));
    CHECK(fields[f < 6 ? 1 : 2] == "1");
    CHECK(fields[f < 6 ? 2 : 1] == "0");
  }
}

TEST_CASE("occupancy requires global tokens for global schedules") {
  const RunResult missing =
      run_cli("occupancy " + data_file("three_segments_global.json"));
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("global") != std::string::npos);

  const RunResult ok = run_cli("occupancy " +
                               data_file("three_segments_global.json") +
                               " --global-tokens 4");
  CHECK(ok.exit_code == 0);
  CHECK(lines_of(ok.out)[0] == "frame,A,B,C,G");
}

TEST_CASE("compare reports SOFT as smoother than HARD") {
  const RunResult r = run_cli("compare " + data_file("two_segments.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("SOFT max_step") != std::string::npos);
  CHECK(r.out.find("HARD max_step 2") != std::string::npos);
  CHECK(r.out.find("smoother: SOFT") != std::string::npos);
  CHECK(r.out.find("boundary frames 5->6") != std::string::npos);
}

TEST_CASE("identical invocations produce bitwise-identical files") {
  const fs::path first = scratch_dir() / "det_a.csv";
  const fs::path second = scratch_dir() / "det_b.csv";
  const std::string invocation =
      "occupancy " + data_file("two_segments.json") +
      " --profile random --seed 7 --out ";
  CHECK(run_cli(invocation + first.string()).exit_code == 0);
  CHECK(run_cli(invocation + second.string()).exit_code == 0);
  const std::string a = slurp(first);
  CHECK(!a.empty());
  CHECK(a == slurp(second));
}

TEST_CASE("unknown flags and subcommands exit with a usage error") {
  CHECK(run_cli("curves --L 8 --frobnicate").exit_code == 2);
  CHECK(run_cli("transmogrify").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);  // a subcommand is required
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("curves --help").exit_code == 0);
}
