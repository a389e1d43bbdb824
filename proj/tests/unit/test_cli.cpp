#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "rislink/result_table.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kData = RIS_TEST_DATA;

int run(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string("\"") + RIS_LINKSIM_EXE + "\" " + args + " >\"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& leaf) : dir(fs::temp_directory_path() / ("rislink_cli_" + leaf)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    [[nodiscard]] fs::path log() const { return dir.parent_path() / (dir.filename().string() + ".log"); }
};

bool empty_dir(const fs::path& p) { return fs::is_empty(p); }

} // namespace

TEST_CASE("list-presets") {
    Scratch s("list");
    CHECK(run("list-presets", s.log()) == 0);
    const auto text = slurp(s.log());
    for (const char* n : {"fig2a", "fig7", "fig10b", "table1", "table2"}) {
        CHECK(text.find(n) != std::string::npos);
    }
}

TEST_CASE("validate accepts a good file and writes nothing") {
    Scratch s("validate");
    CHECK(run("--out \"" + s.dir.string() + "\" validate \"" + kData + "/single_ris_ber.scn\"", s.log()) == 0);
    CHECK(slurp(s.log()).rfind("ok ", 0) == 0);
    CHECK(empty_dir(s.dir));
}

TEST_CASE("scenario errors exit with 2 and list every problem") {
    Scratch s("bad");
    CHECK(run("validate \"" + kData + "/bad_two_errors.scn\"", s.log()) == 2);
    const auto text = slurp(s.log());
    CHECK(text.find("line 3") != std::string::npos);
    CHECK(text.find("colour") != std::string::npos);
    CHECK(run("validate \"" + kData + "/bad_band.scn\"", s.log()) == 2);
    CHECK(slurp(s.log()).find("6-100 GHz") != std::string::npos);
    CHECK(run("--out \"" + s.dir.string() + "\" run \"" + kData + "/bad_band.scn\"", s.log()) == 2);
    CHECK(empty_dir(s.dir));
}

TEST_CASE("usage errors exit with 1") {
    Scratch s("usage");
    CHECK(run("frobnicate", s.log()) == 1);
    CHECK(run("preset fig6", s.log()) == 1);
    CHECK(run("--format parquet list-presets", s.log()) == 1);
    CHECK(run("validate \"" + kData + "/no_such_file.scn\"", s.log()) == 1);
    CHECK(run("--workers -3 list-presets", s.log()) == 1);
}

TEST_CASE("preset writes CSVs and a manifest") {
    Scratch s("preset");
    CHECK(run("preset table1 --seed 7 --out \"" + s.dir.string() + "\"", s.log()) == 0);
    const auto m = rislink::read_manifest(s.dir / "table1_manifest.json");
    CHECK(m.preset == "table1");
    CHECK(m.seed == 7);
    for (const auto& f : m.files) {
        CHECK(fs::exists(s.dir / f));
    }
    CHECK(fs::exists(s.dir / "table1_ple.csv"));
}

TEST_CASE("run executes a scenario file") {
    Scratch s("run");
    CHECK(run("--seed 3 --out \"" + s.dir.string() + "\" run \"" + kData + "/single_ris_ber.scn\"", s.log()) == 0);
    const auto m = rislink::read_manifest(s.dir / "single_ris_ber_manifest.json");
    CHECK(m.seed == 3);
    REQUIRE(!m.files.empty());
    const auto t = rislink::read_csv(s.dir / m.files[0]);
    CHECK(t.rows().size() == 3);
    CHECK(t.column_index("ci95_high") > t.column_index("ber"));
    const auto first = slurp(s.dir / m.files[0]);
    CHECK(run("--seed 3 --workers 4 --out \"" + s.dir.string() + "\" run \"" + kData + "/single_ris_ber.scn\"",
              s.log()) == 0);
    CHECK(slurp(s.dir / m.files[0]) == first);
}
