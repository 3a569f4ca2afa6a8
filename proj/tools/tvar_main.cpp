#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tvar/coxgen.hpp"
#include "tvar/cumulant.hpp"
#include "tvar/fdiv.hpp"
#include "tvar/io.hpp"

namespace {

using nlohmann::ordered_json;
using namespace tvar;

constexpr int kOk = 0;
constexpr int kFalse = 1;
constexpr int kBadInput = 2;

std::string qvec_str(const QVec& v) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << format_rat(v[i]);
    }
    os << "]";
    return os.str();
}

std::string zvec_str(const ZVec& v) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i].get_str();
    }
    os << "]";
    return os.str();
}

ordered_json qvec_json(const QVec& v) {
    ordered_json a = ordered_json::array();
    for (const Rat& r : v) a.push_back(format_rat(r));
    return a;
}

ordered_json zvec_json(const ZVec& v) {
    ordered_json a = ordered_json::array();
    for (const Int& n : v) a.push_back(n.get_si());
    return a;
}

ordered_json string_list_json(const std::vector<std::string>& v) {
    ordered_json a = ordered_json::array();
    for (const std::string& s : v) a.push_back(s);
    return a;
}

// Vertices of lattice polytopes are integral; fail loudly if not.
ZVec lattice_vertex(const QVec& v) {
    ZVec w;
    for (const Rat& r : v) {
        if (!is_integer(r)) throw std::logic_error("non-integral polytope vertex");
        w.push_back(r.get_num());
    }
    return w;
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

// Loads and validates both input files; issues are input errors here.
struct LoadedPair {
    fdiv::FDivisor s;
    fdiv::SupportFunction h;
};

LoadedPair load_pair(const std::string& file, const std::string& sfFile) {
    LoadedPair in;
    in.s = io::read_fdivisor(file);
    fdiv::Report rep = fdiv::validate_fdivisor(in.s);
    if (!rep.ok()) {
        std::string msg = file + ": invalid f-divisor";
        for (const std::string& issue : rep.issues) msg += "\n  - " + issue;
        throw io::ParseError(msg);
    }
    in.h = io::read_sf(in.s, sfFile);
    rep = fdiv::validate_sf(in.s, in.h);
    if (!rep.ok()) {
        std::string msg = sfFile + ": invalid support function";
        for (const std::string& issue : rep.issues) msg += "\n  - " + issue;
        throw io::ParseError(msg);
    }
    return in;
}

struct FileOutcome {
    std::string file;
    std::string error;  // nonempty marks an input error
    bool verdict = false;
    std::vector<std::string> notes;
};

// Runs `work` over the files concurrently; any input error aborts with
// diagnostics only, so exit code 2 never accompanies a verdict.
template <typename Work>
std::vector<FileOutcome> run_batch(const std::vector<std::string>& files, Work work) {
    std::vector<FileOutcome> out(files.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long i = 0; i < static_cast<long>(files.size()); ++i) {
        out[i].file = files[i];
        try {
            work(files[i], out[i]);
        } catch (const std::exception& e) {
            out[i].error = e.what();
        }
    }
    return out;
}

bool report_input_errors(const std::vector<FileOutcome>& outcomes) {
    bool any = false;
    for (const FileOutcome& o : outcomes)
        if (!o.error.empty()) {
            std::cerr << "error: " << o.error << "\n";
            any = true;
        }
    return any;
}

int run_validate(const std::vector<std::string>& files, bool json) {
    auto outcomes = run_batch(files, [](const std::string& file, FileOutcome& o) {
        fdiv::Report rep = fdiv::validate_fdivisor(io::read_fdivisor(file));
        o.verdict = rep.ok();
        o.notes = rep.issues;
    });
    if (report_input_errors(outcomes)) return kBadInput;

    bool all = true;
    if (json) {
        ordered_json j;
        j["command"] = "validate-fdivisor";
        ordered_json results = ordered_json::array();
        for (const FileOutcome& o : outcomes) {
            ordered_json r;
            r["file"] = o.file;
            r["valid"] = o.verdict;
            r["issues"] = string_list_json(o.notes);
            results.push_back(r);
            all = all && o.verdict;
        }
        j["results"] = results;
        emit(j);
    } else {
        for (const FileOutcome& o : outcomes) {
            std::cout << o.file << ": " << (o.verdict ? "valid" : "invalid") << " f-divisor\n";
            for (const std::string& issue : o.notes) std::cout << "  - " << issue << "\n";
            all = all && o.verdict;
        }
    }
    return all ? kOk : kFalse;
}

int run_check(const std::vector<std::string>& files, const std::string& criterion, bool json) {
    auto outcomes = run_batch(files, [&](const std::string& file, FileOutcome& o) {
        fdiv::FDivisor s = io::read_fdivisor(file);
        fdiv::Report rep = fdiv::validate_fdivisor(s);
        if (!rep.ok()) {
            std::string msg = file + ": invalid f-divisor";
            for (const std::string& issue : rep.issues) msg += "\n  - " + issue;
            throw io::ParseError(msg);
        }
        if (criterion == "toric") {
            fdiv::ToricResult r = fdiv::is_toric(s);
            o.verdict = r.toric;
            for (const fdiv::BasePoint& p : r.exceptional)
                o.notes.push_back("exceptional point " + p.str());
        } else if (criterion == "toric-cover") {
            fdiv::CriterionResult r = fdiv::toric_cover_check(s);
            o.verdict = r.ok;
            o.notes = r.witnesses;
        } else {
            fdiv::CriterionResult r = fdiv::all_cones_flexible_check(s);
            o.verdict = r.ok;
            o.notes = r.witnesses;
        }
    });
    if (report_input_errors(outcomes)) return kBadInput;

    bool all = true;
    if (json) {
        ordered_json j;
        j["command"] = "check";
        j["criterion"] = criterion;
        ordered_json results = ordered_json::array();
        for (const FileOutcome& o : outcomes) {
            ordered_json r;
            r["file"] = o.file;
            r["verdict"] = o.verdict;
            r["witnesses"] = string_list_json(o.notes);
            results.push_back(r);
            all = all && o.verdict;
        }
        j["results"] = results;
        emit(j);
    } else {
        for (const FileOutcome& o : outcomes) {
            std::cout << o.file << ": " << criterion << (o.verdict ? " holds" : " fails") << "\n";
            for (const std::string& w : o.notes) std::cout << "  - " << w << "\n";
            all = all && o.verdict;
        }
    }
    return all ? kOk : kFalse;
}

int run_divisor(const std::string& file, const std::string& sfFile, bool json) {
    LoadedPair in = load_pair(file, sfFile);
    fdiv::InvariantDivisor d = fdiv::divisor(in.s, in.h);
    bool effective = fdiv::is_effective(in.s, in.h);

    if (json) {
        ordered_json j;
        j["command"] = "divisor";
        ordered_json hor = ordered_json::array();
        for (const auto& [ray, coeff] : d.horizontal) {
            ordered_json r;
            r["ray"] = zvec_json(ray);
            r["coeff"] = format_rat(coeff);
            hor.push_back(r);
        }
        j["horizontal"] = hor;
        ordered_json ver = ordered_json::array();
        for (const auto& [p, v, coeff] : d.vertical) {
            ordered_json r;
            r["point"] = p.str();
            r["vertex"] = qvec_json(v);
            r["coeff"] = format_rat(coeff);
            ver.push_back(r);
        }
        j["vertical"] = ver;
        j["effective"] = effective;
        emit(j);
    } else {
        std::cout << "horizontal part:\n";
        for (const auto& [ray, coeff] : d.horizontal)
            std::cout << "  ray " << zvec_str(ray) << ": " << format_rat(coeff) << "\n";
        std::cout << "vertical part:\n";
        for (const auto& [p, v, coeff] : d.vertical)
            std::cout << "  point " << p.str() << ", vertex " << qvec_str(v) << ": "
                      << format_rat(coeff) << "\n";
        std::cout << "effective: " << (effective ? "yes" : "no") << "\n";
    }
    return kOk;
}

int run_ample(const std::string& file, const std::string& sfFile, bool json) {
    LoadedPair in = load_pair(file, sfFile);
    fdiv::CriterionResult r = fdiv::ample_necessary(in.s, in.h);

    if (json) {
        ordered_json j;
        j["command"] = "ample-check";
        j["ample_necessary_passed"] = r.ok;
        j["witnesses"] = string_list_json(r.witnesses);
        emit(j);
    } else {
        std::cout << "ample necessary conditions " << (r.ok ? "hold" : "fail") << "\n";
        for (const std::string& w : r.witnesses) std::cout << "  - " << w << "\n";
    }
    return r.ok ? kOk : kFalse;
}

int run_polar_chart(const std::string& file, const std::string& sfFile, const std::string& point,
                    long cell, bool json) {
    LoadedPair in = load_pair(file, sfFile);
    fdiv::BasePoint q = io::parse_base_point(point);
    if (cell < 0) throw io::ParseError("--cell: expected a nonnegative index");

    fdiv::SupportFunction chart;
    try {
        chart = fdiv::polar_chart(in.s, in.h, q, static_cast<size_t>(cell));
    } catch (const std::invalid_argument& e) {
        std::cerr << "polar chart unavailable: " << e.what() << "\n";
        return kFalse;
    }

    if (json) {
        std::cout << io::write_sf(chart);
    } else {
        std::cout << "polar chart at point " << q.str() << ", cell " << cell << "\n";
        std::cout << "lin:\n";
        for (size_t k = 0; k < chart.lin.size(); ++k)
            std::cout << "  cone " << k << ": u = " << qvec_str(chart.lin[k]) << "\n";
        std::cout << "pieces:\n";
        for (const auto& [p, v] : chart.pieces)
            for (size_t k = 0; k < v.size(); ++k)
                std::cout << "  point " << p.str() << ", cell " << k << ": u = "
                          << qvec_str(v[k].u) << ", a = " << format_rat(v[k].a) << "\n";
    }
    return kOk;
}

int run_cox(const std::string& file, bool json) {
    fdiv::FDivisor s = io::read_fdivisor(file);
    coxgen::TrinomialPresentation pres = coxgen::cox_presentation(s);
    auto name = [&](uint32_t v) { return pres.vars.name(v); };

    if (json) {
        ordered_json j;
        j["command"] = "cox";
        ordered_json gens = ordered_json::array();
        for (const coxgen::SGen& g : pres.sVars) {
            ordered_json r;
            r["name"] = pres.vars.name(g.var);
            r["ray"] = zvec_json(g.ray);
            gens.push_back(r);
        }
        for (const coxgen::TGen& g : pres.tVars) {
            ordered_json r;
            r["name"] = pres.vars.name(g.var);
            r["point"] = g.p.str();
            r["vertex"] = qvec_json(g.v);
            r["mu"] = g.mu.get_si();
            gens.push_back(r);
        }
        j["generators"] = gens;
        ordered_json rels = ordered_json::array();
        for (const coxgen::Relation& rel : pres.relations) {
            ordered_json r;
            r["z"] = format_rat(rel.z);
            r["poly"] = coxgen::relation_poly(rel).to_string(name);
            rels.push_back(r);
        }
        j["relations"] = rels;
        j["ring"] = coxgen::ring_string(pres);
        emit(j);
    } else {
        std::cout << "generators:\n";
        for (const coxgen::SGen& g : pres.sVars)
            std::cout << "  " << pres.vars.name(g.var) << ": ray " << zvec_str(g.ray) << "\n";
        for (const coxgen::TGen& g : pres.tVars)
            std::cout << "  " << pres.vars.name(g.var) << ": point " << g.p.str() << ", vertex "
                      << qvec_str(g.v) << ", multiplicity " << g.mu.get_str() << "\n";
        std::cout << "relations:\n";
        for (const coxgen::Relation& rel : pres.relations)
            std::cout << "  z = " << format_rat(rel.z) << ": "
                      << coxgen::relation_poly(rel).to_string(name) << "\n";
        std::cout << "ring: " << coxgen::ring_string(pres) << "\n";
    }
    return kOk;
}

std::string binomial_str(const cum::SVSpec& spec, const std::vector<ZVec>& points,
                         const cum::Binomial& b) {
    auto mono = [&](const std::vector<int>& e) {
        std::vector<std::string> factors;
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            std::string f = "z" + cum::tuple_str(cum::representative_tuple(spec, points[i]));
            if (e[i] > 1) f += "^" + std::to_string(e[i]);
            factors.push_back(f);
        }
        if (factors.empty()) return std::string("1");
        std::sort(factors.begin(), factors.end());
        std::string out = factors[0];
        for (size_t i = 1; i < factors.size(); ++i) out += "*" + factors[i];
        return out;
    };
    return mono(b.a) + " - " + mono(b.b);
}

int run_secant(const std::vector<int>& dims, const std::vector<int>& degs, bool tangential,
               bool idealRequested, int idealDegree, bool json) {
    cum::SVSpec spec{dims, degs};
    spec.check();
    cum::SecantReport rep = cum::classify(spec);

    std::vector<QVec> polyVerts;
    if (!rep.latticePoints.empty()) polyVerts = cum::secant_polytope(spec).vertices();

    std::vector<cum::Binomial> ideal;
    if (idealRequested) {
        if (idealDegree < 1) throw io::ParseError("--ideal-degree: expected a positive bound");
        ideal = cum::toric_ideal_upto(rep.latticePoints, idealDegree, !tangential);
    }

    if (json) {
        ordered_json j;
        j["command"] = "secant";
        j["dims"] = dims;
        j["degs"] = degs;
        j["tangential"] = tangential;
        j["dimX"] = rep.dimX;
        j["dimP"] = rep.dimP;
        j["dimSec"] = rep.dimSec;
        j["dimTan"] = rep.dimTan;
        j["degenerate"] = rep.degenerate;
        ordered_json pts = ordered_json::array();
        for (const ZVec& u : rep.latticePoints) pts.push_back(zvec_json(u));
        j["latticePoints"] = pts;
        ordered_json verts = ordered_json::array();
        for (const QVec& v : polyVerts) verts.push_back(zvec_json(lattice_vertex(v)));
        j["polytopeVertices"] = verts;
        ordered_json gens = ordered_json::array();
        for (const ZVec& u : rep.monoidGenerators) gens.push_back(zvec_json(u));
        j["monoidGenerators"] = gens;
        if (idealRequested) {
            j["idealDegree"] = idealDegree;
            ordered_json rels = ordered_json::array();
            for (const cum::Binomial& b : ideal) {
                ordered_json r;
                r["a"] = b.a;
                r["b"] = b.b;
                r["str"] = binomial_str(spec, rep.latticePoints, b);
                rels.push_back(r);
            }
            j["ideal"] = rels;
        }
        emit(j);
    } else {
        std::cout << "dimX = " << rep.dimX << "\n";
        std::cout << "dimP = " << rep.dimP << "\n";
        std::cout << "dimSec = " << rep.dimSec << "\n";
        std::cout << "dimTan = " << rep.dimTan << "\n";
        std::cout << "degenerate: " << (rep.degenerate ? "yes" : "no") << "\n";
        std::cout << "lattice points:";
        for (const ZVec& u : rep.latticePoints) std::cout << " " << zvec_str(u);
        std::cout << "\npolytope vertices:";
        for (const QVec& v : polyVerts) std::cout << " " << zvec_str(lattice_vertex(v));
        std::cout << "\nmonoid generators:";
        for (const ZVec& u : rep.monoidGenerators) std::cout << " " << zvec_str(u);
        std::cout << "\n";
        if (idealRequested) {
            std::cout << "ideal relations up to degree " << idealDegree << " ("
                      << (tangential ? "tangential" : "secant") << "):\n";
            if (ideal.empty()) std::cout << "  (none)\n";
            for (const cum::Binomial& b : ideal)
                std::cout << "  " << binomial_str(spec, rep.latticePoints, b) << "\n";
        }
    }
    return kOk;
}

int run_sv_verify(const std::vector<int>& dims, const std::vector<int>& degs, int npoints,
                  unsigned seed, bool json) {
    cum::SVSpec spec{dims, degs};
    spec.check();
    if (npoints < 1) throw io::ParseError("--points: expected a positive count");

    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 9);
    auto rnd = [&] { return rat(num(rng), den(rng)); };

    std::vector<cum::SecPoint> pts(npoints);
    for (cum::SecPoint& p : pts) {
        p.t = rnd();
        for (int d : spec.dims) {
            QVec a(d), b(d);
            for (int k = 0; k < d; ++k) {
                a[k] = rnd();
                b[k] = rnd();
            }
            p.v.push_back(a);
            p.w.push_back(b);
        }
    }
    int failures = cum::sec_identity_failures(spec, pts);

    if (json) {
        ordered_json j;
        j["command"] = "sv-verify";
        j["dims"] = dims;
        j["degs"] = degs;
        j["points"] = npoints;
        j["seed"] = seed;
        j["failures"] = failures;
        j["ok"] = failures == 0;
        emit(j);
    } else {
        std::cout << "points checked: " << npoints << "\n";
        std::cout << "failures: " << failures << "\n";
        std::cout << "identities " << (failures == 0 ? "verified" : "FAILED") << "\n";
    }
    return failures == 0 ? kOk : kFalse;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complexity-one T-variety and secant-variety calculator"};
    app.require_subcommand(1);

    bool jsonOut = false;
    int jobs = 0;

    std::vector<std::string> files;
    std::string sfFile, criterion, pointArg;
    long cellArg = 0;
    std::vector<int> dims, degs;
    bool tangential = false;
    int idealDegree = 0;
    int npoints = 20;
    unsigned seed = 20260825;

    auto common = [&](CLI::App* sub) {
        sub->add_option_function<std::string>(
               "--format", [&jsonOut](const std::string& v) { jsonOut = (v == "json"); },
               "Output format (text or json)")
            ->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--jobs", jobs, "Worker threads for batches and kernels");
        return sub;
    };

    CLI::App* validateCmd = common(app.add_subcommand(
        "validate-fdivisor", "Validate f-divisor files against the structural rules"));
    validateCmd->add_option("files", files, "f-divisor JSON files")->required()->expected(-1);

    CLI::App* checkCmd =
        common(app.add_subcommand("check", "Evaluate a named criterion on f-divisor files"));
    checkCmd->add_option("files", files, "f-divisor JSON files")->required()->expected(-1);
    checkCmd->add_option("--criterion", criterion, "Criterion to evaluate")
        ->required()
        ->check(CLI::IsMember({"toric", "toric-cover", "all-cones-flexible"}));

    CLI::App* divisorCmd = common(
        app.add_subcommand("divisor", "Invariant divisor of a support function"));
    divisorCmd->add_option("file", files, "f-divisor JSON file")->required()->expected(1);
    divisorCmd->add_option("--sf", sfFile, "Support function JSON file")->required();

    CLI::App* ampleCmd = common(
        app.add_subcommand("ample-check", "Necessary ampleness conditions for a support function"));
    ampleCmd->add_option("file", files, "f-divisor JSON file")->required()->expected(1);
    ampleCmd->add_option("--sf", sfFile, "Support function JSON file")->required();

    CLI::App* polarCmd = common(
        app.add_subcommand("polar-chart", "Support function of the polar chart at a slice cell"));
    polarCmd->add_option("file", files, "f-divisor JSON file")->required()->expected(1);
    polarCmd->add_option("--sf", sfFile, "Support function JSON file")->required();
    polarCmd->add_option("--point", pointArg, "Base point (rational or inf)")->required();
    polarCmd->add_option("--cell", cellArg, "Cell index in the slice at the point")->required();

    CLI::App* coxCmd =
        common(app.add_subcommand("cox", "Trinomial Cox ring presentation of an f-divisor"));
    coxCmd->add_option("file", files, "f-divisor JSON file")->required()->expected(1);

    CLI::App* secantCmd = common(app.add_subcommand(
        "secant", "Classify the secant of a Segre-Veronese variety in cumulant coordinates"));
    secantCmd->add_option("--dims", dims, "Projective factor dimensions")->required();
    secantCmd->add_option("--degs", degs, "Symmetric power per factor")->required();
    secantCmd->add_flag("--tangential", tangential, "Work with the tangential variety");
    CLI::Option* idealOpt =
        secantCmd->add_option("--ideal-degree", idealDegree, "Binomial relation degree bound");

    CLI::App* svCmd = common(app.add_subcommand(
        "sv-verify", "Verify the secant parameterization identities at random points"));
    svCmd->add_option("--dims", dims, "Projective factor dimensions")->required();
    svCmd->add_option("--degs", degs, "Symmetric power per factor")->required();
    svCmd->add_option("--points", npoints, "Number of random points");
    svCmd->add_option("--seed", seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadInput;
    }

#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#endif

    try {
        if (*validateCmd) return run_validate(files, jsonOut);
        if (*checkCmd) return run_check(files, criterion, jsonOut);
        if (*divisorCmd) return run_divisor(files[0], sfFile, jsonOut);
        if (*ampleCmd) return run_ample(files[0], sfFile, jsonOut);
        if (*polarCmd) return run_polar_chart(files[0], sfFile, pointArg, cellArg, jsonOut);
        if (*coxCmd) return run_cox(files[0], jsonOut);
        if (*secantCmd)
            return run_secant(dims, degs, tangential, idealOpt->count() > 0, idealDegree, jsonOut);
        if (*svCmd) return run_sv_verify(dims, degs, npoints, seed, jsonOut);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    }
    return kBadInput;
}
