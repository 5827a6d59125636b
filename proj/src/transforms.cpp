#include "vinfo/transforms.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "vinfo/error.hpp"
#include "vinfo/random.hpp"
#include "vinfo/text.hpp"

namespace vinfo {

std::string_view transform_kind_name(TransformKind k) {
    switch (k) {
        case TransformKind::identity: return "identity";
        case TransformKind::shuffle: return "shuffle";
        case TransformKind::select_fields: return "select_fields";
        case TransformKind::overlap_mask: return "overlap_mask";
        case TransformKind::token_filter: return "token_filter";
        case TransformKind::token_remap: return "token_remap";
        case TransformKind::sentence_encrypt: return "sentence_encrypt";
    }
    return "identity";
}

TransformKind parse_transform_kind(std::string_view s) {
    for (auto k : {TransformKind::identity, TransformKind::shuffle, TransformKind::select_fields,
                   TransformKind::overlap_mask, TransformKind::token_filter, TransformKind::token_remap,
                   TransformKind::sentence_encrypt})
        if (transform_kind_name(k) == s) return k;
    throw ConfigError("unknown transform kind '" + std::string(s) + "'");
}

std::string TransformSpec::name() const {
    std::string n(transform_kind_name(kind));
    if (!fields.empty() && kind != TransformKind::identity) n += "(" + join(fields, ",") + ")";
    return n;
}

void TransformSpec::validate(const std::vector<std::string>& schema) const {
    const bool stochastic = kind == TransformKind::shuffle || kind == TransformKind::token_remap ||
                            kind == TransformKind::sentence_encrypt;
    if (stochastic && !seed) throw ConfigError(name() + " requires a seed");
    for (const auto& f : fields)
        if (std::find(schema.begin(), schema.end(), f) == schema.end())
            throw ConfigError(name() + ": field '" + f + "' is not in the schema");
    switch (kind) {
        case TransformKind::select_fields:
            if (fields.empty()) throw ConfigError("select_fields requires at least one field");
            break;
        case TransformKind::overlap_mask: {
            const std::size_t designated = fields.empty() ? schema.size() : fields.size();
            if (designated != 2) throw ConfigError("overlap_mask requires exactly two designated fields");
            if (!fields.empty() && fields[0] == fields[1]) throw ConfigError("overlap_mask fields must differ");
            if (mask_token.empty()) throw ConfigError("overlap_mask requires a mask token");
            break;
        }
        case TransformKind::token_filter:
            if (allowlist.empty()) throw ConfigError("token_filter requires a non-empty allowlist");
            break;
        default: break;
    }
}

namespace {

const TokenizeOptions kSplitPunct{.lowercase = false, .split_punctuation = true};

std::string hex_token(std::string_view prefix, std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(prefix) + buf;
}

std::vector<std::string> split_ws(std::string_view s) { return tokenize(s, {.lowercase = false}); }

// Allowlist entries as lower-cased token sequences, longest first.
std::vector<std::vector<std::string>> allowlist_sequences(const std::vector<std::string>& allow) {
    std::vector<std::vector<std::string>> seqs;
    for (const auto& a : allow) {
        auto toks = tokenize(a, {.lowercase = true, .split_punctuation = true});
        if (!toks.empty()) seqs.push_back(std::move(toks));
    }
    std::stable_sort(seqs.begin(), seqs.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return seqs;
}

std::string filter_text(std::string_view text, const std::vector<std::vector<std::string>>& seqs) {
    const auto toks = tokenize(text, kSplitPunct);
    std::vector<std::string> lower;
    lower.reserve(toks.size());
    for (const auto& t : toks) lower.push_back(to_lower_ascii(t));
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < toks.size();) {
        std::size_t matched = 0;
        for (const auto& seq : seqs) {
            if (i + seq.size() > toks.size()) continue;
            if (std::equal(seq.begin(), seq.end(), lower.begin() + static_cast<std::ptrdiff_t>(i))) {
                matched = seq.size();
                break;
            }
        }
        if (matched) {
            for (std::size_t k = 0; k < matched; ++k) kept.push_back(toks[i + k]);
            i += matched;
        } else {
            ++i;
        }
    }
    return join(kept);
}

std::pair<std::string, std::string> mask_overlap(std::string_view a, std::string_view b, const std::string& mask) {
    const auto ta = tokenize(a, kSplitPunct);
    const auto tb = tokenize(b, kSplitPunct);
    std::unordered_set<std::string> la, lb;
    for (const auto& t : ta) la.insert(to_lower_ascii(t));
    for (const auto& t : tb) lb.insert(to_lower_ascii(t));
    auto render = [&](const std::vector<std::string>& toks, const std::unordered_set<std::string>& other) {
        std::vector<std::string> out;
        out.reserve(toks.size());
        for (const auto& t : toks) out.push_back(other.contains(to_lower_ascii(t)) ? t : mask);
        return join(out);
    };
    return {render(ta, lb), render(tb, la)};
}

}  // namespace

Dataset apply(const TransformSpec& t, const Dataset& data) {
    t.validate(data.schema);
    Dataset out = data;
    const std::uint64_t seed = t.seed.value_or(0);

    switch (t.kind) {
        case TransformKind::identity: break;

        case TransformKind::shuffle:
            for (auto& inst : out.instances) {
                for (auto& [name, text] : inst.fields) {
                    auto toks = split_ws(text);
                    Rng rng(mix_seed(seed, inst.id + '\x1f' + name));
                    rng.shuffle(toks);
                    text = join(toks);
                }
            }
            break;

        case TransformKind::select_fields: {
            std::vector<std::string> kept;
            for (const auto& f : data.schema)
                if (std::find(t.fields.begin(), t.fields.end(), f) != t.fields.end()) kept.push_back(f);
            out.schema = kept;
            for (auto& inst : out.instances) {
                std::map<std::string, std::string> fields;
                for (const auto& f : kept) fields[f] = inst.fields.at(f);
                inst.fields = std::move(fields);
            }
            break;
        }

        case TransformKind::overlap_mask: {
            const auto& pair = t.fields.empty() ? data.schema : t.fields;
            for (auto& inst : out.instances) {
                auto [ma, mb] = mask_overlap(inst.fields.at(pair[0]), inst.fields.at(pair[1]), t.mask_token);
                inst.fields[pair[0]] = std::move(ma);
                inst.fields[pair[1]] = std::move(mb);
            }
            break;
        }

        case TransformKind::token_filter: {
            const auto seqs = allowlist_sequences(t.allowlist);
            if (seqs.empty()) throw ConfigError("token_filter allowlist has no tokens");
            const auto& targets = t.fields.empty() ? data.schema : t.fields;
            for (auto& inst : out.instances)
                for (const auto& f : targets) inst.fields[f] = filter_text(inst.fields.at(f), seqs);
            break;
        }

        case TransformKind::token_remap: {
            std::unordered_map<std::string, std::string> inverse;
            for (auto& inst : out.instances) {
                for (auto& [name, text] : inst.fields) {
                    auto toks = split_ws(text);
                    for (auto& tok : toks) {
                        auto mapped = hex_token("v", hash_string(tok, seed));
                        auto [it, fresh] = inverse.emplace(mapped, tok);
                        if (!fresh && it->second != tok)
                            throw Error("token_remap collision between '" + tok + "' and '" + it->second + "'");
                        tok = std::move(mapped);
                    }
                    text = join(toks);
                }
            }
            break;
        }

        case TransformKind::sentence_encrypt: {
            std::unordered_map<std::string, std::string> inverse;
            for (auto& inst : out.instances) {
                const auto plain = serialize(inst, data.schema);
                auto cipher = hex_token("enc", hash_string(plain, seed));
                auto [it, fresh] = inverse.emplace(cipher, plain);
                if (!fresh && it->second != plain) throw Error("sentence_encrypt collision for instance " + inst.id);
                for (auto& [name, text] : inst.fields) text.clear();
                if (!data.schema.empty()) inst.fields[data.schema.front()] = std::move(cipher);
            }
            break;
        }
    }
    return out;
}

std::vector<std::string> load_allowlist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open allowlist '" + path + "'");
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        auto e = line.find_last_not_of(" \t\r");
        out.push_back(line.substr(b, e - b + 1));
    }
    return out;
}

std::vector<AttributeRow> attribute_report(const std::vector<TransformSpec>& specs, const FamilySpec& family,
                                           const Dataset& train, const Dataset& dev, const Dataset& eval) {
    std::vector<TransformSpec> all = specs;
    if (std::none_of(all.begin(), all.end(), [](const auto& s) { return s.kind == TransformKind::identity; }))
        all.insert(all.begin(), TransformSpec{});

    std::vector<AttributeRow> rows;
    for (const auto& spec : all) {
        AttributeRow row;
        row.transform = spec.name();
        try {
            const auto tr = apply(spec, train);
            const auto dv = apply(spec, dev);
            const auto ev = apply(spec, eval);
            const auto pair = train_pair(family, tr, dv);
            const auto analysis = compute_all(pair, ev);
            row.v_information_bits = analysis.summary.v_information_bits;
            row.std_err = analysis.summary.std_err;
            row.n = analysis.summary.n;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace vinfo
