#include "vinfo/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vinfo/conditional.hpp"
#include "vinfo/config.hpp"
#include "vinfo/error.hpp"
#include "vinfo/io.hpp"
#include "vinfo/random.hpp"
#include "vinfo/slices.hpp"
#include "vinfo/synthetic.hpp"
#include "vinfo/transforms.hpp"

namespace vinfo {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string family;
    std::vector<std::string> transforms;
    std::string label;
    std::optional<std::size_t> min_count, top_k, repeats;
    std::string fractions;
    std::string out;
    std::string model;
    std::string pvi;
    std::vector<std::string> inputs;
    std::string scalar;
    std::string scores;
    std::string data;
};

// Counts failed report rows; any failure turns the exit code to 1.
struct RunState {
    int failed_rows = 0;
};

RunConfig resolve_config(const Options& o, bool required) {
    RunConfig cfg;
    if (!o.config.empty()) cfg = load_run_config(o.config);
    else if (required) throw ConfigError("--config is required for this subcommand");
    if (!o.family.empty()) {
        cfg.family = FamilySpec::defaults(parse_family_kind(o.family));
    }
    cfg.apply_seed(o.seed.value_or(cfg.seed));
    if (!o.out.empty()) cfg.output_dir = o.out;
    return cfg;
}

Dataset load_split(const std::optional<fs::path>& p, const char* name) {
    if (!p) throw ConfigError(std::string("run config has no '") + name + "' dataset");
    return read_dataset(*p);
}

Dataset load_eval(const RunConfig& cfg) {
    if (cfg.test) return read_dataset(*cfg.test);
    return load_split(cfg.dev, "dev");
}

json provenance(const RunConfig& cfg, const TrainedPair* pair) {
    json p = {{"seed", cfg.seed}, {"family", to_json(cfg.family)}, {"family_digest", family_digest(cfg.family)}};
    if (pair) {
        p["selected_epoch_g_prime"] = pair->metadata.selected_epoch_g_prime;
        p["selected_epoch_g"] = pair->metadata.selected_epoch_g;
    }
    return p;
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

TrainedPair obtain_pair(const Options& o, const RunConfig& cfg) {
    if (!o.model.empty()) return load_pair(o.model);
    const auto train = load_split(cfg.train, "train");
    const auto dev = load_split(cfg.dev, "dev");
    return train_pair(cfg.family, train, dev);
}

json entropy_json(const EntropyEstimate& e) { return {{"bits", e.bits}, {"n", e.n}, {"std_err", e.std_err}}; }

json summary_json(const PviSummary& s) {
    return {{"n", s.n},
            {"v_information_bits", s.v_information_bits},
            {"std_err", s.std_err},
            {"label_entropy", entropy_json(s.label_entropy)},
            {"conditional_entropy", entropy_json(s.conditional_entropy)}};
}

void write_pvi_report(const fs::path& dir, const PviAnalysis& a, const LabelSpace& labels, json meta) {
    std::ostringstream csv;
    write_pvi_csv(a.records, labels, csv);
    write_file_atomic(dir / "pvi.csv", csv.str());
    meta["summary"] = summary_json(a.summary);
    write_json(dir / "pvi_summary.json", meta);
}

std::vector<double> parse_fractions(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad fraction '" + item + "'");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_synth(const Options& o, std::ostream& out) {
    RunConfig cfg = resolve_config(o, false);
    PlantedSpec spec = cfg.synth.value_or(PlantedSpec{});
    spec.seed = cfg.seed;
    // Without --out, write next to the configured training file so the same config can consume it.
    const fs::path dir = o.out.empty() && cfg.train ? cfg.train->parent_path() : cfg.output_dir;
    json truth;
    if (cfg.synth_independent) {
        const std::size_t dev_n = spec.dev_n ? spec.dev_n : std::max<std::size_t>(1, spec.n / 2);
        const std::size_t test_n = spec.test_n ? spec.test_n : std::max<std::size_t>(1, spec.n / 2);
        write_dataset(generate_independent(spec.n, spec.n_classes, mix_seed(spec.seed, "train"), Split::train,
                                           spec.vocab_size), dir / "train.jsonl");
        write_dataset(generate_independent(dev_n, spec.n_classes, mix_seed(spec.seed, "dev"), Split::dev,
                                           spec.vocab_size), dir / "dev.jsonl");
        write_dataset(generate_independent(test_n, spec.n_classes, mix_seed(spec.seed, "test"), Split::test,
                                           spec.vocab_size), dir / "test.jsonl");
        truth = {{"kind", "independent"}, {"true_info_bits", 0.0}, {"seed", cfg.seed}};
    } else {
        const auto data = generate_planted(spec);
        write_dataset(data.train, dir / "train.jsonl");
        write_dataset(data.dev, dir / "dev.jsonl");
        write_dataset(data.test, dir / "test.jsonl");
        truth = {{"kind", "planted"},
                 {"true_info_bits", data.true_info_bits},
                 {"triggers", data.triggers},
                 {"spec", to_json(spec)},
                 {"seed", cfg.seed}};
    }
    write_json(dir / "truth.json", truth);
    out << "true_info_bits=" << format_real(truth["true_info_bits"].get<double>()) << "\n";
    return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
    const RunConfig cfg = resolve_config(o, true);
    const auto pair = obtain_pair(o, cfg);
    const fs::path dir = cfg.output_dir;
    save_pair(pair, (dir / "model.bin").string());
    json report = {{"provenance", provenance(cfg, &pair)},
                   {"dev_entropy_g_prime", pair.metadata.dev_entropy_g_prime},
                   {"dev_entropy_g", pair.metadata.dev_entropy_g}};
    write_json(dir / "train_report.json", report);
    out << "selected_epoch_g_prime=" << pair.metadata.selected_epoch_g_prime
        << " selected_epoch_g=" << pair.metadata.selected_epoch_g << "\n";
    return kExitOk;
}

int cmd_pvi(const Options& o, std::ostream& out) {
    const RunConfig cfg = resolve_config(o, true);
    const auto pair = obtain_pair(o, cfg);
    const auto eval = load_eval(cfg);
    const auto analysis = compute_all(pair, eval);
    write_pvi_report(cfg.output_dir, analysis, eval.label_space, {{"provenance", provenance(cfg, &pair)}});
    out << "n=" << analysis.summary.n << " v_information_bits=" << format_real(analysis.summary.v_information_bits)
        << "\n";
    return kExitOk;
}

int cmd_vinfo(const Options& o, std::ostream& out) {
    const RunConfig cfg = resolve_config(o, true);
    const auto pair = obtain_pair(o, cfg);
    const auto eval = load_eval(cfg);
    const auto analysis = compute_all(pair, eval);
    json report = summary_json(analysis.summary);
    report["provenance"] = provenance(cfg, &pair);
    if (!cfg.x_fields.empty()) {
        const auto cond = conditional_v_information(cfg.family, load_split(cfg.train, "train"),
                                                    load_split(cfg.dev, "dev"), eval, cfg.b_fields, cfg.x_fields);
        report["conditional"] = {{"b_fields", cfg.b_fields},
                                 {"x_fields", cfg.x_fields},
                                 {"bits", cond.bits},
                                 {"given_b", entropy_json(cond.given_b)},
                                 {"given_b_and_x", entropy_json(cond.given_b_and_x)},
                                 {"selected_epoch_b", cond.selected_epoch_b},
                                 {"selected_epoch_bx", cond.selected_epoch_bx}};
    }
    write_json(fs::path(cfg.output_dir) / "vinfo.json", report);
    out << "v_information_bits=" << format_real(analysis.summary.v_information_bits)
        << " std_err=" << format_real(analysis.summary.std_err) << "\n";
    return kExitOk;
}

int cmd_transform_report(const Options& o, std::ostream& out, RunState& st) {
    RunConfig cfg = resolve_config(o, true);
    if (!o.transforms.empty()) {
        cfg.transforms.clear();
        for (const auto& name : o.transforms) {
            TransformSpec t;
            t.kind = parse_transform_kind(name);
            cfg.transforms.push_back(std::move(t));
        }
        cfg.apply_seed(cfg.seed);
    }
    const auto rows = attribute_report(cfg.transforms, cfg.family, load_split(cfg.train, "train"),
                                       load_split(cfg.dev, "dev"), load_eval(cfg));
    std::ostringstream csv;
    csv << "transform,v_information_bits,std_err,n,error\n";
    for (const auto& r : rows) {
        csv << csv_escape(r.transform) << ',' << (r.error ? "" : format_real(r.v_information_bits)) << ','
            << (r.error ? "" : format_real(r.std_err)) << ',' << r.n << ',' << csv_escape(r.error.value_or("")) << '\n';
        if (r.error) ++st.failed_rows;
        out << r.transform << " " << (r.error ? "error: " + *r.error : format_real(r.v_information_bits)) << "\n";
    }
    write_file_atomic(fs::path(cfg.output_dir) / "transform_report.csv", csv.str());
    json meta = {{"provenance", provenance(cfg, nullptr)}, {"note", kAttributeReportNote}};
    for (const auto& t : cfg.transforms) meta["transforms"].push_back(to_json(t));
    write_json(fs::path(cfg.output_dir) / "transform_report.meta.json", meta);
    return kExitOk;
}

int cmd_artefacts(const Options& o, std::ostream& out) {
    const RunConfig cfg = resolve_config(o, true);
    const std::string label = !o.label.empty() ? o.label : cfg.artefact_class.value_or("");
    if (label.empty()) throw ConfigError("artefacts needs --class or artefacts.class in the config");
    const auto pair = obtain_pair(o, cfg);
    const auto eval = load_eval(cfg);
    const auto rows = loo_artefacts(*pair.g_prime, eval, eval.label_space.index_of(label),
                                    o.min_count.value_or(cfg.min_count), o.top_k.value_or(cfg.top_k),
                                    std::span<const std::string>(pair.fields));
    std::ostringstream csv;
    csv << "rank,token,class,delta_bits,count\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        csv << i + 1 << ',' << csv_escape(rows[i].token) << ',' << csv_escape(label) << ','
            << format_real(rows[i].delta_bits) << ',' << rows[i].count << '\n';
        out << rows[i].token << " (" << format_real(rows[i].delta_bits) << ")\n";
    }
    write_file_atomic(fs::path(cfg.output_dir) / "artefacts.csv", csv.str());
    write_json(fs::path(cfg.output_dir) / "artefacts.meta.json",
               {{"provenance", provenance(cfg, &pair)},
                {"class", label},
                {"min_count", o.min_count.value_or(cfg.min_count)},
                {"top_k", o.top_k.value_or(cfg.top_k)}});
    return kExitOk;
}

int cmd_slices(const Options& o, std::ostream& out) {
    const RunConfig cfg = resolve_config(o, true);
    const auto pair = obtain_pair(o, cfg);
    const auto eval = load_eval(cfg);
    const auto analysis = compute_all(pair, eval);
    std::vector<SliceSpec> specs;
    if (cfg.slices.empty()) {
        specs.push_back(SliceSpec::whole());
        for (const auto& l : eval.label_space.labels()) specs.push_back(SliceSpec::by_class(eval.label_space, l));
    } else {
        for (const auto& s : cfg.slices) specs.push_back(s.resolve(eval));
    }
    const auto rows = slice_mean_pvi(analysis.records, eval, specs, cfg.min_slice_n);
    std::ostringstream csv;
    csv << "slice,n,mean_pvi_bits,flagged\n";
    for (const auto& r : rows) {
        csv << csv_escape(r.slice) << ',' << r.n << ',' << format_real(r.mean_pvi_bits) << ',' << (r.flagged ? 1 : 0)
            << '\n';
        out << r.slice << " n=" << r.n << " mean_pvi_bits=" << format_real(r.mean_pvi_bits)
            << (r.flagged ? " (flagged: small slice)" : "") << "\n";
    }
    write_file_atomic(fs::path(cfg.output_dir) / "slices.csv", csv.str());
    write_json(fs::path(cfg.output_dir) / "slices.meta.json",
               {{"provenance", provenance(cfg, &pair)}, {"note", kSliceNote}, {"min_slice_n", cfg.min_slice_n}});
    return kExitOk;
}

int cmd_gap(const Options& o, std::ostream& out) {
    std::vector<PviRecord> records;
    json prov;
    fs::path dir;
    if (!o.pvi.empty()) {
        records = read_pvi_csv(fs::path(o.pvi));
        dir = o.out.empty() ? fs::path(o.pvi).parent_path() : fs::path(o.out);
        prov = {{"source", fs::path(o.pvi).filename().string()}};
    } else {
        const RunConfig cfg = resolve_config(o, true);
        const auto pair = obtain_pair(o, cfg);
        records = compute_all(pair, load_eval(cfg)).records;
        dir = cfg.output_dir;
        prov = provenance(cfg, &pair);
    }
    const auto g = correct_incorrect_gap(records);
    json report = {{"gap_bits", g.gap_bits},
                   {"mean_correct", g.mean_correct},
                   {"mean_incorrect", g.mean_incorrect},
                   {"n_correct", g.n_correct},
                   {"n_incorrect", g.n_incorrect},
                   {"t_statistic", g.t_statistic},
                   {"df", g.df},
                   {"p_value", g.p_value},
                   {"test", "welch_t_two_sided"},
                   {"crossover_bits", g.crossover_bits ? json(*g.crossover_bits) : json(nullptr)},
                   {"provenance", prov}};
    write_json(dir / "gap.json", report);
    out << "gap_bits=" << format_real(g.gap_bits) << " p_value=" << format_real(g.p_value) << "\n";
    return kExitOk;
}

int cmd_correlate(const Options& o, std::ostream& out) {
    if (o.inputs.empty() || o.inputs.size() > 2) throw ConfigError("correlate takes one or two PVI CSV files");
    if (o.inputs.size() == 1 && o.scalar.empty()) throw ConfigError("correlate needs a second PVI file or --scalar");
    const auto a = read_pvi_csv(fs::path(o.inputs[0]));
    double r = 0.0;
    json report = {{"a", o.inputs[0]}};
    if (o.inputs.size() == 2) {
        r = pvi_correlation(a, read_pvi_csv(fs::path(o.inputs[1])));
        report["b"] = o.inputs[1];
    } else {
        r = pvi_correlation(a, read_scalar_csv(o.scalar));
        report["scalar"] = o.scalar;
    }
    report["pearson_r"] = r;
    report["n"] = a.size();
    if (!o.out.empty()) write_json(fs::path(o.out) / "correlation.json", report);
    out << "r=" << format_real(r) << "\n";
    return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, RunState& st) {
    const RunConfig cfg = resolve_config(o, true);
    const auto fractions = o.fractions.empty() ? cfg.fractions : parse_fractions(o.fractions);
    const std::size_t repeats = o.repeats.value_or(cfg.repeats);
    const auto rows = fraction_sweep(cfg.family, load_split(cfg.train, "train"), load_split(cfg.dev, "dev"),
                                     load_eval(cfg), fractions, repeats, cfg.seed);
    std::ostringstream csv;
    csv << "fraction,sample_size,repeats,mean_bits,std_bits,flagged,error\n";
    for (const auto& r : rows) {
        csv << format_real(r.fraction) << ',' << r.sample_size << ',' << r.repeats << ','
            << format_real(r.mean_bits) << ',' << format_real(r.std_bits) << ',' << (r.flagged ? 1 : 0) << ','
            << csv_escape(r.error) << '\n';
        if (!r.error.empty()) ++st.failed_rows;
        out << "fraction=" << format_real(r.fraction) << " mean_bits=" << format_real(r.mean_bits)
            << " std_bits=" << format_real(r.std_bits) << (r.flagged ? " (flagged)" : "") << "\n";
    }
    write_file_atomic(fs::path(cfg.output_dir) / "sweep.csv", csv.str());
    write_json(fs::path(cfg.output_dir) / "sweep.meta.json",
               {{"provenance", provenance(cfg, nullptr)}, {"repeats", repeats}, {"sampling", "with_replacement"}});
    return kExitOk;
}

int cmd_import_scores(const Options& o, std::ostream& out) {
    if (o.scores.empty()) throw ConfigError("import-scores needs --scores");
    std::optional<RunConfig> cfg;
    if (!o.config.empty()) cfg = resolve_config(o, true);
    Dataset data;
    if (!o.data.empty()) data = read_dataset(fs::path(o.data));
    else if (cfg) data = load_eval(*cfg);
    else throw ConfigError("import-scores needs --data or --config");
    const auto scores = read_score_file(fs::path(o.scores));
    const auto analysis = import_scores(scores, data);
    fs::path dir = !o.out.empty() ? fs::path(o.out) : cfg ? cfg->output_dir : fs::path("out");
    json meta = {{"provenance",
                  {{"model", scores.model},
                   {"log_base", scores.log_base == LogBase::e ? "e" : "2"},
                   {"scores", fs::path(o.scores).filename().string()}}}};
    write_pvi_report(dir, analysis, data.label_space, meta);
    out << "n=" << analysis.summary.n << " v_information_bits=" << format_real(analysis.summary.v_information_bits)
        << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Usable-information analysis of labeled text datasets", "vinfo"};
    app.require_subcommand(1);
    Options o;
    RunState st;

    auto common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", o.config, "Run configuration (JSON)");
        if (config_required) c->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Override the run seed");
        sub->add_option("--family", o.family, "Override the family kind (null_only, bow_linear, mlp)");
        sub->add_option("--out", o.out, "Output directory");
    };
    auto model_opt = [&](CLI::App* sub) {
        sub->add_option("--model", o.model, "Reuse a model written by 'train' instead of training")->check(CLI::ExistingFile);
    };

    auto* synth = app.add_subcommand("synth", "Generate planted or independent synthetic datasets");
    common(synth, false);
    auto* train = app.add_subcommand("train", "Train g' and g and save them");
    common(train, true);
    auto* pvi = app.add_subcommand("pvi", "Per-instance PVI on the held-out split");
    common(pvi, true);
    model_opt(pvi);
    auto* vinfo = app.add_subcommand("vinfo", "V-usable information on the held-out split");
    common(vinfo, true);
    model_opt(vinfo);
    auto* treport = app.add_subcommand("transform-report", "V-information under input transformations");
    common(treport, true);
    treport->add_option("--transform", o.transforms, "Transform kind (repeatable); replaces the config list");
    auto* artefacts = app.add_subcommand("artefacts", "Leave-one-out token artefacts for a class");
    common(artefacts, true);
    model_opt(artefacts);
    artefacts->add_option("--class", o.label, "Class label");
    artefacts->add_option("--min-count", o.min_count, "Minimum instances containing a token");
    artefacts->add_option("--top-k", o.top_k, "Number of tokens to report");
    auto* slices = app.add_subcommand("slices", "Mean PVI per slice");
    common(slices, true);
    model_opt(slices);
    auto* gap = app.add_subcommand("gap", "PVI gap between correct and incorrect predictions");
    common(gap, false);
    model_opt(gap);
    gap->add_option("--pvi", o.pvi, "Use an existing PVI CSV instead of training")->check(CLI::ExistingFile);
    auto* correlate = app.add_subcommand("correlate", "Pearson correlation of PVI estimates");
    correlate->add_option("inputs", o.inputs, "PVI CSV file(s)")->check(CLI::ExistingFile);
    correlate->add_option("--scalar", o.scalar, "Two-column id,value CSV to correlate against")->check(CLI::ExistingFile);
    correlate->add_option("--out", o.out, "Output directory");
    auto* sweep = app.add_subcommand("sweep", "V-information vs. training-set fraction");
    common(sweep, true);
    sweep->add_option("--fractions", o.fractions, "Comma-separated fractions in (0, 1]");
    sweep->add_option("--repeats", o.repeats, "Resamples per fraction");
    auto* import = app.add_subcommand("import-scores", "PVI from externally computed log-probabilities");
    common(import, false);
    import->add_option("--scores", o.scores, "Score file (JSON lines)")->check(CLI::ExistingFile);
    import->add_option("--data", o.data, "Dataset the scores refer to")->check(CLI::ExistingFile);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        int code = kExitOk;
        if (*synth) code = cmd_synth(o, out);
        else if (*train) code = cmd_train(o, out);
        else if (*pvi) code = cmd_pvi(o, out);
        else if (*vinfo) code = cmd_vinfo(o, out);
        else if (*treport) code = cmd_transform_report(o, out, st);
        else if (*artefacts) code = cmd_artefacts(o, out);
        else if (*slices) code = cmd_slices(o, out);
        else if (*gap) code = cmd_gap(o, out);
        else if (*correlate) code = cmd_correlate(o, out);
        else if (*sweep) code = cmd_sweep(o, out, st);
        else if (*import) code = cmd_import_scores(o, out);
        if (st.failed_rows > 0) {
            err << st.failed_rows << " report row(s) failed\n";
            return kExitError;
        }
        return code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace vinfo
