#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vinfo/cli.hpp"
#include "vinfo/io.hpp"

using namespace vinfo;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_json(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

// A workspace with planted data and a run config pointing at it.
struct Workspace {
    fs::path root;

    explicit Workspace(const std::string& name) : root(fs::temp_directory_path() / ("vinfo_cli_" + name)) {
        fs::remove_all(root);
        fs::create_directories(root);
        write_json(root / "synth.json",
                   {{"seed", 5}, {"synth", {{"kind", "planted"}, {"n", 2000}, {"vocab_size", 500}}},
                    {"output_dir", "data"}});
        REQUIRE(run({"synth", "--config", (root / "synth.json").string(), "--out", (root / "data").string()}).code ==
                kExitOk);
        write_json(root / "run.json", {{"seed", 5},
                                       {"data",
                                        {{"train", "data/train.jsonl"},
                                         {"dev", "data/dev.jsonl"},
                                         {"test", "data/test.jsonl"}}},
                                       {"family", "bow_linear"},
                                       {"transforms", {"shuffle", "sentence_encrypt"}},
                                       {"artefacts", {{"class", "c0"}}},
                                       {"sweep", {{"fractions", {0.5, 1.0}}, {"repeats", 1}}},
                                       {"output_dir", "out"}});
    }
    ~Workspace() { fs::remove_all(root); }

    std::string config() const { return (root / "run.json").string(); }
    fs::path out() const { return root / "out"; }
};

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"vinfo", "--no-such-flag"}).code == kExitUsage);
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
    const std::string cmd = std::string(VINFO_CLI_PATH) + " frobnicate > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == kExitUsage);
}

TEST_CASE("configuration errors exit with 1") {
    const auto dir = fs::temp_directory_path() / "vinfo_cli_bad";
    fs::create_directories(dir);
    write_json(dir / "noseed.json", {{"family", "bow_linear"}});
    const auto r = run({"vinfo", "--config", (dir / "noseed.json").string()});
    CHECK(r.code == kExitError);
    CHECK(r.err.find("seed") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("synth writes datasets and the closed-form truth") {
    Workspace ws("synth");
    const auto truth = json::parse(slurp(ws.root / "data" / "truth.json"));
    CHECK(std::abs(truth["true_info_bits"].get<double>() - 0.531) < 1e-3);
    CHECK(read_dataset(ws.root / "data" / "train.jsonl").size() == 2000);
}

TEST_CASE("vinfo equals the mean of the pvi column") {
    Workspace ws("identity");
    REQUIRE(run({"pvi", "--config", ws.config()}).code == kExitOk);
    REQUIRE(run({"vinfo", "--config", ws.config()}).code == kExitOk);
    const auto records = read_pvi_csv(ws.out() / "pvi.csv");
    double sum = 0.0;
    for (const auto& r : records) sum += r.pvi_bits;
    const double mean = sum / static_cast<double>(records.size());
    const auto report = json::parse(slurp(ws.out() / "vinfo.json"));
    CHECK(report["v_information_bits"].get<double>() == mean);
    CHECK(std::abs(mean - 0.531) <= 0.05);
    CHECK(report["provenance"]["seed"] == 5);
    CHECK(report["provenance"].contains("family_digest"));
    CHECK(report["provenance"].contains("selected_epoch_g_prime"));
}

TEST_CASE("train then reuse the saved model") {
    Workspace ws("model");
    REQUIRE(run({"train", "--config", ws.config()}).code == kExitOk);
    REQUIRE(run({"pvi", "--config", ws.config()}).code == kExitOk);
    const auto direct = slurp(ws.out() / "pvi.csv");
    REQUIRE(run({"pvi", "--config", ws.config(), "--model", (ws.out() / "model.bin").string()}).code == kExitOk);
    CHECK(slurp(ws.out() / "pvi.csv") == direct);
}

TEST_CASE("correlate, gap, slices, artefacts and sweep") {
    Workspace ws("reports");
    REQUIRE(run({"pvi", "--config", ws.config()}).code == kExitOk);
    const auto pvi = (ws.out() / "pvi.csv").string();

    auto r = run({"correlate", pvi, pvi});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "r=1\n");

    CHECK(run({"gap", "--pvi", pvi}).code == kExitOk);
    const auto gap = json::parse(slurp(ws.out() / "gap.json"));
    CHECK(gap["gap_bits"].get<double>() > 1.0);

    CHECK(run({"slices", "--config", ws.config()}).code == kExitOk);
    CHECK(slurp(ws.out() / "slices.csv").rfind("slice,n,mean_pvi_bits,flagged\nall,", 0) == 0);

    r = run({"artefacts", "--config", ws.config(), "--top-k", "3"});
    CHECK(r.code == kExitOk);
    const auto truth = json::parse(slurp(ws.root / "data" / "truth.json"));
    CHECK(r.out.rfind(truth["triggers"][0][0].get<std::string>(), 0) == 0);

    CHECK(run({"sweep", "--config", ws.config()}).code == kExitOk);
    CHECK(slurp(ws.out() / "sweep.csv").find("\n1,2000,1,") != std::string::npos);
}

TEST_CASE("transform report rows") {
    Workspace ws("transforms");
    CHECK(run({"transform-report", "--config", ws.config()}).code == kExitOk);
    const auto csv = slurp(ws.out() / "transform_report.csv");
    CHECK(csv.find("identity,") != std::string::npos);
    CHECK(csv.find("sentence_encrypt,") != std::string::npos);
    CHECK(fs::exists(ws.out() / "transform_report.meta.json"));

    // A failing row turns the exit code to 1 without hiding the other rows.
    CHECK(run({"transform-report", "--config", ws.config(), "--transform", "select_fields"}).code == kExitError);
    CHECK(slurp(ws.out() / "transform_report.csv").find("identity,0.") != std::string::npos);
}

TEST_CASE("import-scores builds pvi from external log-probabilities") {
    Workspace ws("import");
    const auto test = read_dataset(ws.root / "data" / "test.jsonl");
    ScoreFile sf;
    sf.log_base = LogBase::e;
    sf.model = {{"name", "external"}};
    for (const auto& inst : test.instances) sf.lines.push_back({inst.id, std::log(0.5), std::log(0.5), {}, {}});
    std::ofstream out(ws.root / "scores.jsonl");
    write_score_file(sf, out);
    out.close();
    const auto r = run({"import-scores", "--scores", (ws.root / "scores.jsonl").string(), "--data",
                        (ws.root / "data" / "test.jsonl").string(), "--out", (ws.root / "imported").string()});
    CHECK(r.code == kExitOk);
    const auto summary = json::parse(slurp(ws.root / "imported" / "pvi_summary.json"));
    CHECK(summary["summary"]["v_information_bits"].get<double>() == 0.0);
}

TEST_CASE("reports are byte-identical across runs") {
    Workspace ws("determinism");
    std::map<std::string, std::string> first;
    for (const auto& cmd : {"pvi", "vinfo", "slices"}) REQUIRE(run({cmd, "--config", ws.config()}).code == kExitOk);
    for (const auto& e : fs::directory_iterator(ws.out())) first[e.path().filename().string()] = slurp(e.path());
    fs::remove_all(ws.out());
    for (const auto& cmd : {"pvi", "vinfo", "slices"}) REQUIRE(run({cmd, "--config", ws.config()}).code == kExitOk);
    for (const auto& [name, content] : first) CHECK(slurp(ws.out() / name) == content);
}
