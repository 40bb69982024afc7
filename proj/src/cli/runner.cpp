#include <ctime>
#include <fstream>

#include "stabledrift/anchors.hpp"
#include "stabledrift/errors.hpp"
#include "stabledrift/scenarios.hpp"

namespace sd::cli {

namespace fs = std::filesystem;

namespace {

std::string utc_stamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

fs::path fresh_bundle_dir(const fs::path& out_dir) {
    const fs::path base = out_dir / "reports";
    const std::string stamp = utc_stamp();
    fs::path dir = base / stamp;
    for (int k = 1; fs::exists(dir); ++k) dir = base / (stamp + "-" + std::to_string(k));
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error("cannot write '" + p.string() + "'");
    os << content;
    if (!os) throw Error("write failed for '" + p.string() + "'");
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& c, const fs::path& out_dir, const Logger& log) {
    const AdmissibilityInfo adm = check_admissibility(c);
    if (log) log("scenario " + c.scenario + (c.quick ? " (quick)" : ""));
    ScenarioResult res = run_scenario(c, adm, log);

    RunOutcome out;
    out.bundle_dir = fresh_bundle_dir(out_dir);

    json reports = json::array();
    json failures = json::array();
    bool any_fail = false;
    for (const auto& r : res.reports) {
        const std::string file = r.name() + ".json";
        json rj = r.to_json();
        write_file(out.bundle_dir / file, rj.dump(2) + "\n");
        if (r.verdict() == Verdict::fail) any_fail = true;
        json fl = json::array();
        for (const auto& f : rj["failures"]) {
            fl.push_back(f["name"]);
            json g = f;
            g["report"] = r.name();
            failures.push_back(g);
        }
        reports.push_back({{"name", r.name()},
                           {"anchor", r.anchor()},
                           {"verdict", to_string(r.verdict())},
                           {"file", file},
                           {"failures", fl}});
    }
    json artifacts = json::array();
    for (const auto& a : res.artifacts) {
        write_file(out.bundle_dir / a.file, a.content);
        artifacts.push_back(a.file);
    }

    out.exit_code = any_fail ? 1 : 0;
    json s;
    s["schema"] = "stabledrift-summary/1";
    s["scenario"] = c.scenario;
    s["anchor"] = anchors::scenario_anchor(c.scenario);
    s["verdict"] = any_fail ? "fail" : "pass";
    s["exit_code"] = out.exit_code;
    s["config"] = c.to_json();
    s["admissibility"] = adm.to_json();
    s["reports"] = reports;
    s["failures"] = failures;
    s["artifacts"] = artifacts;
    s["provenance"] = {{"seed", c.seed}, {"grid", {{"N", c.grid_n()}, {"L", c.L}, {"dim", c.dim}}},
                       {"n_paths", c.paths()}, {"quick", c.quick}};
    write_file(out.bundle_dir / "summary.json", s.dump(2) + "\n");
    out.summary = std::move(s);
    return out;
}

}  // namespace sd::cli
