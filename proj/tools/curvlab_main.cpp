#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "curvlab/falsify.hpp"
#include "curvlab/gallery.hpp"
#include "curvlab/homomorphism.hpp"
#include "curvlab/metric.hpp"
#include "curvlab/psh.hpp"
#include "curvlab/scenario.hpp"
#include "curvlab/serialization.hpp"

namespace fs = std::filesystem;
using namespace curvlab;

namespace {

std::string defaultOutDir() {
    const char* env = std::getenv("CURVLAB_OUT");
    return (env != nullptr && *env != '\0') ? std::string(env) : std::string(".");
}

void ensureDir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw curvlab::ParseError("cannot create output directory '" + dir + "': " + ec.message());
    }
}

std::string joinPath(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

// File stems derive from user-supplied scenario names; keep them path-safe.
std::string fileStem(const std::string& name) {
    std::string s = name.empty() ? std::string("scenario") : name;
    for (char& c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != '-' && c != '_' && c != '.') {
            c = '-';
        }
    }
    return s;
}

std::string utcTimestamp() {
    std::time_t t = std::time(nullptr);
    std::tm tmv{};
    gmtime_r(&t, &tmv);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tmv);
    return buf;
}

// Reports are timestamp-free so identical configurations write identical
// bytes; the wall clock goes to this side file instead.
void writeRunMetadata(const std::string& dir, const std::string& runName, const std::string& command) {
    std::string body = std::string("{\n") + "  \"run\": \"" + fileStem(runName) + "\",\n" +
                       "  \"command\": \"" + command + "\",\n" + "  \"tool\": \"curvlab\",\n" +
                       "  \"written_utc\": \"" + utcTimestamp() + "\"\n}\n";
    writeTextFile(joinPath(dir, fileStem(runName) + "_meta.json"), body);
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void printReportLine(const VerificationReport& rep) {
    const char* tag = rep.pass ? "pass" : (rep.inconclusive ? "inconclusive" : "FAIL");
    std::cout << "  [" << tag << "] " << rep.check << "  residual=" << num(rep.residual)
              << "  tolerance=" << num(rep.tolerance) << "\n";
}

void writeOutcomeFiles(const std::string& dir, const ScenarioOutcome& out, const std::string& scenarioName) {
    const std::string stem = fileStem(scenarioName);
    int idx = 0;
    for (const auto& rep : out.reports) {
        ++idx;
        char numBuf[8];
        std::snprintf(numBuf, sizeof numBuf, "%02d", idx);
        writeTextFile(joinPath(dir, stem + "_" + numBuf + "_" + fileStem(rep.check) + ".json"), toJson(rep));
    }
    for (const auto& [name, content] : out.artifacts) {
        writeTextFile(joinPath(dir, fileStem(name)), content);
    }
}

int cmdValidate(const std::string& file) {
    Scenario sc = scenarioFromJson(readTextFile(file));
    std::cout << "scenario " << sc.name << "\n";
    bool ok = true;
    auto line = [&ok](bool good, const std::string& part, const std::string& msg) {
        std::cout << "  [" << (good ? "ok" : "FAIL") << "] " << part << ": " << msg << "\n";
        ok = ok && good;
    };

    std::optional<MetricField> src;
    std::optional<MetricField> tgt;
    if (sc.source) {
        try {
            src = MetricField::validate(*sc.source, sc.domain, sc.tol.hermitianRel);
            line(true, "source metric", "rank " + std::to_string(src->rank()));
        } catch (const MetricError& e) {
            line(false, "source metric", e.what());
        }
    }
    if (sc.target) {
        try {
            tgt = MetricField::validate(*sc.target, sc.domain, sc.tol.hermitianRel);
            line(true, "target metric", "rank " + std::to_string(tgt->rank()));
        } catch (const MetricError& e) {
            line(false, "target metric", e.what());
        }
    }
    if (sc.hom) {
        if (src && tgt) {
            try {
                HomomorphismField h(*sc.hom, *src, *tgt);
                line(true, "bundle map",
                     std::to_string(h.source().rank()) + " -> " + std::to_string(h.target().rank()));
            } catch (const FieldError& e) {
                line(false, "bundle map", e.what());
            }
        } else {
            line(false, "bundle map", "given without two valid metrics");
        }
    }
    if (sc.fibered) {
        line(true, "weighted fiber set",
             std::to_string(sc.fibered->fiberCount()) + " fibers, exponent " + num(sc.fibered->exponent()));
    }
    std::cout << "checks requested:";
    for (const auto& c : sc.checks) std::cout << " " << c;
    std::cout << "\n" << (ok ? "inputs valid" : "inputs invalid") << "\n";
    return ok ? 0 : 1;
}

int cmdRun(const std::string& file, const std::string& out, const std::optional<std::uint64_t>& seedOverride) {
    Scenario sc = scenarioFromJson(readTextFile(file));
    if (seedOverride) sc.seed = *seedOverride;
    ensureDir(out);
    std::cout << "scenario " << sc.name << " (" << sc.checks.size() << " checks, seed " << sc.seed << ")\n";
    ScenarioOutcome outcome = runScenario(sc);
    writeOutcomeFiles(out, outcome, sc.name);
    writeRunMetadata(out, sc.name + "_run", "run");
    for (const auto& rep : outcome.reports) printReportLine(rep);
    for (const auto& [name, content] : outcome.artifacts) {
        (void)content;
        std::cout << "  wrote " << joinPath(out, fileStem(name)) << "\n";
    }
    int code = exitCodeFor(outcome.reports);
    if (code == 0) {
        std::cout << "all checks passed\n";
    } else if (code == 3) {
        std::cout << "no failures, but some checks were inconclusive\n";
    } else {
        std::cout << "some checks failed\n";
    }
    return code;
}

int cmdGalleryList() {
    for (const auto& name : galleryNames()) {
        GalleryEntry entry = gallery(name);
        std::cout << name << "  (" << entry.scenarios.size()
                  << (entry.scenarios.size() == 1 ? " scenario)  " : " scenarios) ") << entry.summary << "\n";
    }
    return 0;
}

int cmdGalleryRun(const std::string& name, const std::string& out) {
    GalleryEntry entry = gallery(name);
    GalleryRunResult res = runGalleryEntry(entry);
    ensureDir(out);
    for (std::size_t i = 0; i < entry.scenarios.size(); ++i) {
        std::cout << "scenario " << entry.scenarios[i].name << "\n";
        writeOutcomeFiles(out, res.outcomes[i], entry.scenarios[i].name);
        for (const auto& rep : res.outcomes[i].reports) printReportLine(rep);
    }
    int idx = 0;
    for (const auto& rep : res.extraReports) {
        ++idx;
        char numBuf[8];
        std::snprintf(numBuf, sizeof numBuf, "%02d", idx);
        writeTextFile(joinPath(out, fileStem(entry.name) + "_extra_" + numBuf + "_" + fileStem(rep.check) + ".json"),
                      toJson(rep));
        std::cout << "cross-scenario:\n";
        printReportLine(rep);
    }
    writeRunMetadata(out, entry.name + "_gallery", "gallery run");
    if (res.expectationsMatched) {
        std::cout << "verdicts match the recorded expectations\n";
        return 0;
    }
    for (const auto& m : res.mismatches) std::cout << "  mismatch: " << m << "\n";
    std::cout << "verdicts differ from the recorded expectations\n";
    return 1;
}

int cmdFalsify(const FalsifyOptions& opt, const std::string& out) {
    FalsifySummary s = falsify(opt);
    ensureDir(out);
    writeTextFile(joinPath(out, "falsify_summary.json"), toJson(s));
    writeRunMetadata(out, "falsify_run", "falsify");
    std::cout << "trials " << s.trials.size() << " (seed " << opt.seed << ", resolution " << opt.resolution
              << ")\n";
    std::cout << "hypothesis: " << s.hypothesisPassed << " passed, " << s.hypothesisFailed << " failed\n";
    std::cout << "verdicts among passing trials: " << s.conclusionPsh << " psh, " << s.conclusionNotPsh
              << " not-psh, " << s.conclusionInconclusive << " inconclusive\n";
    std::cout << "max-principle violations: " << s.maxPrincipleViolations << "\n";
    std::cout << "counterexamples: " << s.counterexamples << "\n";
    if (s.counterexamples > 0 || s.maxPrincipleViolations > 0) return 1;
    return s.conclusionInconclusive > 0 ? 3 : 0;
}

int cmdMap(const std::string& kind, const std::string& file, const std::string& out) {
    Scenario sc = scenarioFromJson(readTextFile(file));
    ensureDir(out);
    const std::string stem = fileStem(sc.name);
    auto validated = [&sc](const MatrixPolyField& f) {
        return MetricField::validate(f, sc.domain, sc.tol.hermitianRel);
    };
    if (kind == "curvature") {
        if (!sc.source && !sc.target) {
            throw curvlab::ParseError("map curvature needs a source or target metric");
        }
        if (sc.source) {
            std::string path = joinPath(out, stem + "_source_curvature.csv");
            writeTextFile(path, curvatureMapCsv(validated(*sc.source)));
            std::cout << "wrote " << path << "\n";
        }
        if (sc.target) {
            std::string path = joinPath(out, stem + "_target_curvature.csv");
            writeTextFile(path, curvatureMapCsv(validated(*sc.target)));
            std::cout << "wrote " << path << "\n";
        }
        return 0;
    }
    if (!sc.source || !sc.target) {
        throw curvlab::ParseError("map " + kind + " needs both source and target metrics");
    }
    MetricField src = validated(*sc.source);
    MetricField tgt = validated(*sc.target);
    MatrixPolyField a = MatrixPolyField::identity(1);
    if (sc.hom) {
        a = *sc.hom;
    } else if (src.rank() == tgt.rank()) {
        a = MatrixPolyField::identity(src.rank());
    } else {
        throw curvlab::ParseError("map " + kind + ": no bundle map given and the metric ranks differ");
    }
    HomomorphismField h(a, src, tgt);
    if (kind == "norm") {
        std::string path = joinPath(out, stem + "_norm.csv");
        writeTextFile(path, scalarFieldCsv(operatorNormField(h), "norm"));
        std::cout << "wrote " << path << "\n";
    } else {
        std::string path = joinPath(out, stem + "_levi.csv");
        writeTextFile(path, scalarFieldCsv(leviField(logNormField(h)), "levi"));
        std::cout << "wrote " << path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvature and log-norm verification harness for metrized holomorphic bundles"};
    app.set_version_flag("--version", "curvlab 1.0.0");
    app.require_subcommand(1);

    auto* vcmd = app.add_subcommand("validate", "Parse a scenario file and validate its inputs");
    std::string vFile;
    vcmd->add_option("file", vFile, "scenario JSON file")->required();

    auto* rcmd = app.add_subcommand("run", "Run a scenario's checks; one JSON report per check");
    std::string rFile;
    std::string rOut = defaultOutDir();
    std::uint64_t rSeed = 0;
    rcmd->add_option("file", rFile, "scenario JSON file")->required();
    rcmd->add_option("--out", rOut, "output directory (default: $CURVLAB_OUT or .)");
    auto* rSeedOpt = rcmd->add_option("--seed", rSeed, "override the scenario seed");

    auto* gcmd = app.add_subcommand("gallery", "Built-in example configurations");
    gcmd->require_subcommand(1);
    auto* glist = gcmd->add_subcommand("list", "List the gallery entries");
    auto* grun =
        gcmd->add_subcommand("run", "Run an entry and compare verdicts against its recorded expectations");
    std::string gName;
    std::string gOut = defaultOutDir();
    grun->add_option("name", gName, "gallery entry name")->required();
    grun->add_option("--out", gOut, "output directory (default: $CURVLAB_OUT or .)");

    auto* fcmd = app.add_subcommand(
        "falsify", "Random search for counterexamples to the curvature-decrease implication");
    FalsifyOptions fopt;
    std::string fOut = defaultOutDir();
    fcmd->add_option("--trials", fopt.trials, "number of random scenarios");
    fcmd->add_option("--seed", fopt.seed, "master seed; reruns are byte-identical");
    fcmd->add_option("--resolution", fopt.resolution, "grid resolution per axis");
    fcmd->add_option("--vector-samples", fopt.vectorSamples, "sampled-mode probe vectors per node");
    fcmd->add_option("--out", fOut, "output directory (default: $CURVLAB_OUT or .)");

    auto* mcmd = app.add_subcommand("map", "Write CSV heatmaps for a scenario");
    std::string mKind;
    std::string mFile;
    std::string mOut = defaultOutDir();
    mcmd->add_option("kind", mKind, "curvature | norm | levi")
        ->required()
        ->check(CLI::IsMember({"curvature", "norm", "levi"}));
    mcmd->add_option("file", mFile, "scenario JSON file")->required();
    mcmd->add_option("--out", mOut, "output directory (default: $CURVLAB_OUT or .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (vcmd->parsed()) return cmdValidate(vFile);
        if (rcmd->parsed()) {
            std::optional<std::uint64_t> seed;
            if (rSeedOpt->count() > 0) seed = rSeed;
            return cmdRun(rFile, rOut, seed);
        }
        if (glist->parsed()) return cmdGalleryList();
        if (grun->parsed()) return cmdGalleryRun(gName, gOut);
        if (fcmd->parsed()) return cmdFalsify(fopt, fOut);
        if (mcmd->parsed()) return cmdMap(mKind, mFile, mOut);
    } catch (const curvlab::ParseError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const MetricError& e) {
        std::cerr << "invalid metric: " << e.what() << "\n";
        return 2;
    } catch (const FieldError& e) {
        std::cerr << "invalid field: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
