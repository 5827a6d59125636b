#include "vinfo/config.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "vinfo/error.hpp"
#include "vinfo/io.hpp"
#include "vinfo/random.hpp"

namespace vinfo {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, std::string_view what) {
    if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!ok.contains(k)) throw ConfigError("unknown key '" + k + "' in " + std::string(what));
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

// ---------------------------------------------------------------------------
// Specs

json to_json(const FeatureSpec& f) {
    return {{"hash_dim", f.hash_dim},
            {"ngram_orders", f.ngram_orders},
            {"lowercase", f.lowercase},
            {"signed_hashing", f.signed_hashing},
            {"split_punctuation", f.split_punctuation},
            {"sublinear_tf", f.sublinear_tf}};
}

json to_json(const FamilySpec& f) {
    return {{"kind", family_kind_name(f.kind)},
            {"features", to_json(f.features)},
            {"hidden_sizes", f.hidden_sizes},
            {"optimizer",
             {{"algorithm", optimizer_kind_name(f.optimizer.algorithm)},
              {"learning_rate", f.optimizer.learning_rate},
              {"batch_size", f.optimizer.batch_size},
              {"max_epochs", f.optimizer.max_epochs},
              {"early_stop_patience", f.optimizer.early_stop_patience}}},
            {"seed", f.seed}};
}

FeatureSpec feature_spec_from_json(const json& j) {
    reject_unknown(j, {"hash_dim", "ngram_orders", "lowercase", "signed_hashing", "split_punctuation", "sublinear_tf"}, "features");
    FeatureSpec f;
    f.hash_dim = get_or(j, "hash_dim", f.hash_dim);
    f.ngram_orders = get_or(j, "ngram_orders", f.ngram_orders);
    f.lowercase = get_or(j, "lowercase", f.lowercase);
    f.signed_hashing = get_or(j, "signed_hashing", f.signed_hashing);
    f.split_punctuation = get_or(j, "split_punctuation", f.split_punctuation);
    f.sublinear_tf = get_or(j, "sublinear_tf", f.sublinear_tf);
    return f;
}

FamilySpec family_spec_from_json(const json& j) {
    if (j.is_string()) return FamilySpec::defaults(parse_family_kind(j.get<std::string>()));
    reject_unknown(j, {"kind", "features", "hidden_sizes", "optimizer", "seed"}, "family");
    FamilySpec f = FamilySpec::defaults(parse_family_kind(get_or<std::string>(j, "kind", "bow_linear")));
    if (j.contains("features")) {
        const FeatureSpec defaults = f.features;
        json merged = to_json(defaults);
        merged.update(j.at("features"));
        f.features = feature_spec_from_json(merged);
    }
    f.hidden_sizes = get_or(j, "hidden_sizes", f.hidden_sizes);
    if (j.contains("optimizer")) {
        const auto& o = j.at("optimizer");
        reject_unknown(o, {"algorithm", "learning_rate", "batch_size", "max_epochs", "early_stop_patience"}, "optimizer");
        if (o.contains("algorithm")) f.optimizer.algorithm = parse_optimizer_kind(o.at("algorithm").get<std::string>());
        f.optimizer.learning_rate = get_or(o, "learning_rate", f.optimizer.learning_rate);
        f.optimizer.batch_size = get_or(o, "batch_size", f.optimizer.batch_size);
        f.optimizer.max_epochs = get_or(o, "max_epochs", f.optimizer.max_epochs);
        f.optimizer.early_stop_patience = get_or(o, "early_stop_patience", f.optimizer.early_stop_patience);
    }
    f.seed = get_or(j, "seed", f.seed);
    f.validate();
    return f;
}

json to_json(const TransformSpec& t) {
    json j = {{"kind", transform_kind_name(t.kind)}};
    if (t.seed) j["seed"] = *t.seed;
    if (!t.fields.empty()) j["fields"] = t.fields;
    if (t.kind == TransformKind::overlap_mask) j["mask_token"] = t.mask_token;
    if (!t.allowlist.empty()) j["allowlist"] = t.allowlist;
    return j;
}

TransformSpec transform_spec_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (j.is_string()) {
        TransformSpec t;
        t.kind = parse_transform_kind(j.get<std::string>());
        return t;
    }
    reject_unknown(j, {"kind", "seed", "fields", "mask_token", "allowlist", "allowlist_file"}, "transform");
    TransformSpec t;
    t.kind = parse_transform_kind(get_or<std::string>(j, "kind", "identity"));
    if (j.contains("seed")) t.seed = get_or<std::uint64_t>(j, "seed", 0);
    t.fields = get_or(j, "fields", t.fields);
    t.mask_token = get_or(j, "mask_token", t.mask_token);
    t.allowlist = get_or(j, "allowlist", t.allowlist);
    if (j.contains("allowlist_file")) {
        const auto more = load_allowlist(resolve(base_dir, j.at("allowlist_file").get<std::string>()).string());
        t.allowlist.insert(t.allowlist.end(), more.begin(), more.end());
    }
    return t;
}

json to_json(const PlantedSpec& p) {
    return {{"n", p.n},
            {"dev_n", p.dev_n},
            {"test_n", p.test_n},
            {"vocab_size", p.vocab_size},
            {"flip_rate", p.flip_rate},
            {"n_classes", p.n_classes},
            {"triggers_per_class", p.triggers_per_class},
            {"min_filler", p.min_filler},
            {"max_filler", p.max_filler},
            {"layout", p.layout == PlantedLayout::single ? "single" : "nli"},
            {"seed", p.seed}};
}

PlantedSpec planted_spec_from_json(const json& j) {
    reject_unknown(j,
                   {"kind", "n", "dev_n", "test_n", "vocab_size", "flip_rate", "n_classes", "triggers_per_class",
                    "min_filler", "max_filler", "layout", "seed"},
                   "synth");
    PlantedSpec p;
    p.n = get_or(j, "n", p.n);
    p.dev_n = get_or(j, "dev_n", p.dev_n);
    p.test_n = get_or(j, "test_n", p.test_n);
    p.vocab_size = get_or(j, "vocab_size", p.vocab_size);
    p.flip_rate = get_or(j, "flip_rate", p.flip_rate);
    p.n_classes = get_or(j, "n_classes", p.n_classes);
    p.triggers_per_class = get_or(j, "triggers_per_class", p.triggers_per_class);
    p.min_filler = get_or(j, "min_filler", p.min_filler);
    p.max_filler = get_or(j, "max_filler", p.max_filler);
    const auto layout = get_or<std::string>(j, "layout", "single");
    if (layout == "single") p.layout = PlantedLayout::single;
    else if (layout == "nli") p.layout = PlantedLayout::nli;
    else throw ConfigError("unknown planted layout '" + layout + "'");
    p.seed = get_or(j, "seed", p.seed);
    return p;
}

std::string family_digest(const FamilySpec& spec) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_string(to_json(spec).dump())));
    return buf;
}

// ---------------------------------------------------------------------------
// Slices

SliceSpec SliceConfig::resolve(const Dataset& data) const {
    SliceSpec s;
    if (kind == "all") s = SliceSpec::whole();
    else if (kind == "class") s = SliceSpec::by_class(data.label_space, label);
    else if (kind == "overlap") s = SliceSpec::overlap_bin(premise_field, hypothesis_field, lo, hi);
    else if (kind == "ids") {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open id list '" + path.string() + "'");
        std::unordered_set<std::string> ids;
        for (std::string line; std::getline(in, line);)
            if (!line.empty()) ids.insert(line);
        s = SliceSpec::id_list(name.empty() ? "ids" : name, std::move(ids));
    } else if (kind == "scalar") {
        s = SliceSpec::scalar_range(name.empty() ? "scalar" : name, read_scalar_csv(path), min, max);
    } else {
        throw ConfigError("unknown slice kind '" + kind + "'");
    }
    if (!name.empty()) s.name = name;
    return s;
}

// ---------------------------------------------------------------------------
// Run configuration

void RunConfig::apply_seed(std::uint64_t new_seed) {
    seed = new_seed;
    family.seed = new_seed;
    for (std::size_t i = 0; i < transforms.size(); ++i) {
        auto& t = transforms[i];
        if (t.kind == TransformKind::shuffle || t.kind == TransformKind::token_remap ||
            t.kind == TransformKind::sentence_encrypt)
            t.seed = mix_seed(new_seed, "transform-" + std::to_string(i));
    }
    if (synth) synth->seed = new_seed;
}

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
    reject_unknown(j,
                   {"seed", "data", "family", "transforms", "slices", "min_slice_n", "artefacts", "sweep",
                    "conditional", "synth", "output_dir"},
                   "run config");
    RunConfig c;
    c.base_dir = base_dir;
    if (!j.contains("seed")) throw ConfigError("run config requires a seed");
    const auto seed = get_or<std::uint64_t>(j, "seed", 0);

    if (j.contains("data")) {
        const auto& d = j.at("data");
        reject_unknown(d, {"train", "dev", "test"}, "data");
        auto path_of = [&](const char* key) -> std::optional<std::filesystem::path> {
            if (!d.contains(key)) return std::nullopt;
            return resolve(base_dir, d.at(key).get<std::string>());
        };
        c.train = path_of("train");
        c.dev = path_of("dev");
        c.test = path_of("test");
    }
    if (j.contains("family")) c.family = family_spec_from_json(j.at("family"));
    if (j.contains("transforms")) {
        for (const auto& t : j.at("transforms")) {
            if (t.is_object() && t.contains("seed"))
                throw ConfigError("transform seeds are derived from the run seed; remove 'seed' from transforms");
            c.transforms.push_back(transform_spec_from_json(t, base_dir));
        }
    }
    if (j.contains("slices")) {
        for (const auto& s : j.at("slices")) {
            reject_unknown(s, {"kind", "name", "label", "premise_field", "hypothesis_field", "lo", "hi", "path", "min", "max"},
                           "slice");
            SliceConfig sc;
            sc.kind = get_or<std::string>(s, "kind", "all");
            sc.name = get_or<std::string>(s, "name", "");
            sc.label = get_or<std::string>(s, "label", "");
            sc.premise_field = get_or(s, "premise_field", sc.premise_field);
            sc.hypothesis_field = get_or(s, "hypothesis_field", sc.hypothesis_field);
            sc.lo = get_or<std::size_t>(s, "lo", 0);
            sc.hi = get_or<std::size_t>(s, "hi", std::numeric_limits<std::size_t>::max());
            if (s.contains("path")) sc.path = resolve(base_dir, s.at("path").get<std::string>());
            sc.min = get_or(s, "min", -std::numeric_limits<double>::infinity());
            sc.max = get_or(s, "max", std::numeric_limits<double>::infinity());
            if (sc.kind == "class" && sc.label.empty()) throw ConfigError("class slice requires a label");
            if ((sc.kind == "ids" || sc.kind == "scalar") && sc.path.empty())
                throw ConfigError(sc.kind + " slice requires a path");
            c.slices.push_back(std::move(sc));
        }
    }
    c.min_slice_n = get_or(j, "min_slice_n", c.min_slice_n);
    if (j.contains("artefacts")) {
        const auto& a = j.at("artefacts");
        reject_unknown(a, {"class", "min_count", "top_k"}, "artefacts");
        if (a.contains("class")) c.artefact_class = a.at("class").get<std::string>();
        c.min_count = get_or(a, "min_count", c.min_count);
        c.top_k = get_or(a, "top_k", c.top_k);
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        reject_unknown(s, {"fractions", "repeats"}, "sweep");
        c.fractions = get_or(s, "fractions", c.fractions);
        c.repeats = get_or(s, "repeats", c.repeats);
    }
    if (j.contains("conditional")) {
        const auto& s = j.at("conditional");
        reject_unknown(s, {"b_fields", "x_fields"}, "conditional");
        c.b_fields = get_or(s, "b_fields", c.b_fields);
        c.x_fields = get_or(s, "x_fields", c.x_fields);
    }
    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        const auto kind = get_or<std::string>(s, "kind", "planted");
        if (kind != "planted" && kind != "independent") throw ConfigError("synth kind must be planted or independent");
        c.synth_independent = kind == "independent";
        c.synth = planted_spec_from_json(s);
    }
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
    else c.output_dir = resolve(base_dir, "out");

    // Data produced by the config's own synth block may not exist yet.
    for (const auto& p : {c.train, c.dev, c.test})
        if (!c.synth && p && !std::filesystem::exists(*p)) throw ConfigError("data path does not exist: " + p->string());

    c.apply_seed(seed);
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed config '" + path.string() + "': " + e.what());
    }
    return parse_run_config(j, path.parent_path());
}

// ---------------------------------------------------------------------------
// Model files: magic, JSON metadata, then both parameter vectors.

namespace {

constexpr char kMagic[8] = {'V', 'I', 'N', 'F', 'O', 'P', 'R', '1'};

void write_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw ValidationError("truncated model file");
    return v;
}

json descriptor_json(const FeaturePredictor& p) {
    return {{"family", p.descriptor().family},
            {"seed", p.descriptor().seed},
            {"epoch", p.descriptor().epoch},
            {"hidden", p.network().hidden()},
            {"input_dim", p.network().input_dim()}};
}

std::shared_ptr<const FeaturePredictor> read_predictor(std::istream& in, const json& meta, const LabelSpace& labels,
                                                       const FamilySpec& spec) {
    Network net(meta.at("input_dim").get<std::size_t>(), meta.at("hidden").get<std::vector<std::size_t>>(),
                labels.size());
    const auto count = read_u64(in);
    if (count != net.params().size()) throw ValidationError("model parameter count mismatch");
    in.read(reinterpret_cast<char*>(net.params().data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw ValidationError("truncated model file");
    PredictorDescriptor d{meta.at("family").get<std::string>(), meta.at("seed").get<std::uint64_t>(),
                          meta.at("epoch").get<int>()};
    return std::make_shared<const FeaturePredictor>(labels, d, spec, std::move(net));
}

}  // namespace

void save_pair(const TrainedPair& pair, const std::string& path) {
    json meta = {{"family", to_json(pair.spec)},
                 {"labels", pair.g_prime->label_space().labels()},
                 {"fields", pair.fields},
                 {"g_prime", descriptor_json(*pair.g_prime)},
                 {"g", descriptor_json(*pair.g)},
                 {"metadata",
                  {{"selected_epoch_g_prime", pair.metadata.selected_epoch_g_prime},
                   {"selected_epoch_g", pair.metadata.selected_epoch_g},
                   {"dev_entropy_g_prime", pair.metadata.dev_entropy_g_prime},
                   {"dev_entropy_g", pair.metadata.dev_entropy_g},
                   {"seed", pair.metadata.seed}}}};
    std::ostringstream out(std::ios::binary);
    out.write(kMagic, sizeof kMagic);
    const auto text = meta.dump();
    write_u64(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto* p : {pair.g_prime.get(), pair.g.get()}) {
        const auto& params = p->network().params();
        write_u64(out, params.size());
        out.write(reinterpret_cast<const char*>(params.data()), static_cast<std::streamsize>(params.size() * sizeof(double)));
    }
    write_file_atomic(path, out.str());
}

TrainedPair load_pair(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open model '" + path + "'");
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw ValidationError("'" + path + "' is not a model file");
    const auto len = read_u64(in);
    std::string text(len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(len));
    if (!in) throw ValidationError("truncated model file");
    const json meta = json::parse(text);

    TrainedPair pair;
    pair.spec = family_spec_from_json(meta.at("family"));
    const LabelSpace labels(meta.at("labels").get<std::vector<std::string>>());
    pair.fields = meta.at("fields").get<std::vector<std::string>>();
    pair.g_prime = read_predictor(in, meta.at("g_prime"), labels, pair.spec);
    pair.g = read_predictor(in, meta.at("g"), labels, pair.spec);
    const auto& m = meta.at("metadata");
    pair.metadata.selected_epoch_g_prime = m.at("selected_epoch_g_prime").get<int>();
    pair.metadata.selected_epoch_g = m.at("selected_epoch_g").get<int>();
    pair.metadata.dev_entropy_g_prime = m.at("dev_entropy_g_prime").get<std::vector<double>>();
    pair.metadata.dev_entropy_g = m.at("dev_entropy_g").get<std::vector<double>>();
    pair.metadata.seed = m.at("seed").get<std::uint64_t>();
    return pair;
}

}  // namespace vinfo
