#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvcc/bytes.hpp"

// Exit-code contract of the command line tool, driven as a subprocess.

#ifndef CVCC_CLI_PATH
#define CVCC_CLI_PATH "./cvcc"
#endif
#ifndef CVCC_SCENARIO_DIR
#define CVCC_SCENARIO_DIR "scenarios"
#endif

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
    std::string cmd = std::string(CVCC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("cvcc-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("run writes trace and report, exit 0") {
    fs::path dir = fresh_dir("run");
    int rc = run_cli("run --scenario " CVCC_SCENARIO_DIR "/honest-v2r.json --seed 1 --out " +
                     dir.string());
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "trace.txt"));
    CHECK(fs::exists(dir / "report.json"));
}

TEST_CASE("missing scenario file exits 2") {
    CHECK(run_cli("run --scenario /no/such/file.json --seed 1 --out /tmp/cvcc-none") == 2);
}

TEST_CASE("invalid scenario exits 2") {
    fs::path dir = fresh_dir("bad");
    fs::path bad = dir / "bad.json";
    std::ofstream(bad) << R"({"duration_s": 1.0, "nodes": [], "unknown": 1})";
    CHECK(run_cli("run --scenario " + bad.string() + " --out " + dir.string()) == 2);
}

TEST_CASE("search exit codes") {
    // store file missing
    CHECK(run_cli("search --store /no/such/store.bin --key " + std::string(64, '0') +
                  " --keyword x") == 2);
    // malformed key
    fs::path dir = fresh_dir("search");
    fs::path store = dir / "store.bin";
    std::ofstream(store, std::ios::binary); // empty store is valid
    CHECK(run_cli("search --store " + store.string() + " --key zz --keyword x") == 2);
    // keyword absent from an empty store: success, empty output
    CHECK(run_cli("search --store " + store.string() + " --key " + std::string(64, 'a') +
                  " --keyword x") == 0);
}

TEST_CASE("run then search drives the store end to end") {
    fs::path dir = fresh_dir("e2e");
    int rc = run_cli("run --scenario " CVCC_SCENARIO_DIR "/honest-all.json --seed 11 --out " +
                     dir.string());
    REQUIRE(rc == 0);
    REQUIRE(fs::exists(dir / "store.bin"));
    REQUIRE(fs::exists(dir / "owner-keys.json"));

    // pull car1's search key out of the dump
    std::string keys = slurp(dir / "owner-keys.json");
    size_t car1 = keys.find("\"car1\"");
    REQUIRE(car1 != std::string::npos);
    size_t tag = keys.find("\"search_key\": \"", car1);
    REQUIRE(tag != std::string::npos);
    std::string key = keys.substr(tag + 15, 64);

    fs::path hits = dir / "hits.txt";
    int status = std::system((std::string(CVCC_CLI_PATH) + " search --store " +
                              (dir / "store.bin").string() + " --key " + key +
                              " --keyword traffic > " + hits.string())
                                 .c_str());
    CHECK(WEXITSTATUS(status) == 0);
    std::string out = slurp(hits);
    // two uploads from car1 carry the keyword; one 64-hex id per line
    CHECK(std::count(out.begin(), out.end(), '\n') == 2);

    status = std::system((std::string(CVCC_CLI_PATH) + " search --store " +
                          (dir / "store.bin").string() + " --key " + key +
                          " --keyword appears-nowhere > " + hits.string())
                             .c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(slurp(hits).empty());
}

TEST_CASE("register emits a fixture") {
    fs::path dir = fresh_dir("register");
    fs::path out = dir / "tpd.json";
    int rc = run_cli("register --group toy --seed " + std::string(64, '0') +
                     " --id car-1 --pw pw1 --out " + out.string());
    CHECK(rc == 0);
    std::string text = slurp(out);
    CHECK(text.find("\"pid\"") != std::string::npos);
    CHECK(text.find("\"certificate\"") != std::string::npos);
    CHECK(run_cli("register --group toy --seed 123 --id a --pw b") == 2); // short seed
}

TEST_CASE("vectors prints the frozen crypto vectors") {
    fs::path dir = fresh_dir("vectors");
    fs::path out = dir / "v.json";
    int status = std::system((std::string(CVCC_CLI_PATH) + " vectors > " + out.string()).c_str());
    CHECK(WEXITSTATUS(status) == 0);
    std::string text = slurp(out);
    CHECK(text.find("e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855") !=
          std::string::npos);
}
