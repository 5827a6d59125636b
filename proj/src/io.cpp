#include "vinfo/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "vinfo/error.hpp"
#include "vinfo/predictor.hpp"

namespace vinfo {

using nlohmann::json;

namespace {

std::string where(const std::string& source, std::size_t line) { return source + ":" + std::to_string(line) + ": "; }

json parse_line(const std::string& text, const std::string& source, std::size_t line) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(where(source, line) + "malformed JSON: " + e.what());
    }
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    return in;
}

}  // namespace

// ---------------------------------------------------------------------------
// Datasets

Dataset read_dataset(std::istream& in, const std::string& source) {
    Dataset d;
    std::unordered_set<std::string> schema_set, ids;
    bool have_header = false;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (blank(text)) continue;
        const json rec = parse_line(text, source, line);
        if (!rec.is_object()) throw ValidationError(where(source, line) + "record is not a JSON object");
        try {
            if (!have_header) {
                if (!rec.contains("schema") || !rec.contains("labels"))
                    throw ValidationError("first record must be a header with 'schema' and 'labels'");
                d.schema = rec.at("schema").get<std::vector<std::string>>();
                d.label_space = LabelSpace(rec.at("labels").get<std::vector<std::string>>());
                d.split = parse_split(rec.value("split", std::string("train")));
                schema_set.insert(d.schema.begin(), d.schema.end());
                if (schema_set.size() != d.schema.size()) throw ValidationError("duplicate field name in schema");
                have_header = true;
                continue;
            }
            Instance inst;
            inst.id = rec.at("id").get<std::string>();
            if (!ids.insert(inst.id).second) throw ValidationError("duplicate id '" + inst.id + "'");
            const std::string label = rec.at("label").get<std::string>();
            const auto idx = d.label_space.find(label);
            if (!idx) throw ValidationError("label '" + label + "' is not in the declared label space");
            inst.gold = *idx;
            const auto& fields = rec.at("fields");
            if (!fields.is_object()) throw ValidationError("'fields' must be an object");
            for (const auto& [k, v] : fields.items()) {
                if (!schema_set.contains(k)) throw ValidationError("field '" + k + "' is not in the schema");
                inst.fields[k] = v.get<std::string>();
            }
            for (const auto& f : d.schema)
                if (!inst.fields.contains(f)) throw ValidationError("missing field '" + f + "'");
            d.instances.push_back(std::move(inst));
        } catch (const ValidationError& e) {
            throw ValidationError(where(source, line) + e.what());
        } catch (const json::exception& e) {
            throw ValidationError(where(source, line) + "schema mismatch: " + e.what());
        }
    }
    if (!have_header) throw ValidationError(source + ": missing header record");
    return d;
}

Dataset read_dataset(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_dataset(in, path.string());
}

void write_dataset(const Dataset& data, std::ostream& out) {
    json header = {{"schema", data.schema}, {"labels", data.label_space.labels()}, {"split", split_name(data.split)}};
    out << header.dump() << '\n';
    for (const auto& inst : data.instances) {
        json rec = {{"id", inst.id}, {"fields", inst.fields}, {"label", data.label_space.name(inst.gold)}};
        out << rec.dump() << '\n';
    }
}

void write_dataset(const Dataset& data, const std::filesystem::path& path) {
    std::ostringstream os;
    write_dataset(data, os);
    write_file_atomic(path, os.str());
}

// ---------------------------------------------------------------------------
// Score files

namespace {

LogBase parse_log_base(const json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "e" || s == "E") return LogBase::e;
        if (s == "2") return LogBase::two;
    } else if (v.is_number()) {
        if (v.get<double>() == 2.0) return LogBase::two;
    }
    throw ValidationError("log_base must be \"2\" or \"e\"");
}

}  // namespace

ScoreFile read_score_file(std::istream& in, const std::string& source) {
    ScoreFile sf;
    std::optional<LogBase> base;
    std::optional<json> model;
    std::unordered_set<std::string> ids;
    std::string text;
    std::size_t line = 0;
    auto declare = [&](const json& rec) {
        if (rec.contains("log_base")) {
            const auto b = parse_log_base(rec.at("log_base"));
            if (base && *base != b) throw ValidationError("conflicting log_base declarations");
            base = b;
        }
        if (rec.contains("model")) {
            if (model && *model != rec.at("model")) throw ValidationError("conflicting model descriptors");
            model = rec.at("model");
        }
    };
    while (std::getline(in, text)) {
        ++line;
        if (blank(text)) continue;
        const json rec = parse_line(text, source, line);
        try {
            if (!rec.is_object()) throw ValidationError("record is not a JSON object");
            declare(rec);
            if (!rec.contains("id")) {
                if (!sf.lines.empty()) throw ValidationError("header record after score lines");
                continue;
            }
            ScoreLine sl;
            sl.id = rec.at("id").get<std::string>();
            if (!ids.insert(sl.id).second) throw ValidationError("duplicate id '" + sl.id + "'");
            if (!rec.contains("logp_gold_given_x") || !rec.contains("logp_gold_null"))
                throw ValidationError("id '" + sl.id + "' lacks logp_gold_given_x or logp_gold_null");
            sl.logp_gold_given_x = rec.at("logp_gold_given_x").get<double>();
            sl.logp_gold_null = rec.at("logp_gold_null").get<double>();
            if (rec.contains("logp_dist_given_x"))
                sl.logp_dist_given_x = rec.at("logp_dist_given_x").get<std::vector<double>>();
            if (rec.contains("predicted")) sl.predicted = rec.at("predicted").get<std::string>();
            sf.lines.push_back(std::move(sl));
        } catch (const ValidationError& e) {
            throw ValidationError(where(source, line) + e.what());
        } catch (const json::exception& e) {
            throw ValidationError(where(source, line) + e.what());
        }
    }
    if (!base) throw ValidationError(source + ": log_base is not declared");
    sf.log_base = *base;
    if (model) sf.model = *model;
    return sf;
}

ScoreFile read_score_file(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_score_file(in, path.string());
}

void write_score_file(const ScoreFile& scores, std::ostream& out) {
    json header = {{"format", "vinfo-scores"},
                   {"log_base", scores.log_base == LogBase::e ? "e" : "2"},
                   {"model", scores.model}};
    out << header.dump() << '\n';
    for (const auto& l : scores.lines) {
        json rec = {{"id", l.id}, {"logp_gold_given_x", l.logp_gold_given_x}, {"logp_gold_null", l.logp_gold_null}};
        if (l.logp_dist_given_x) rec["logp_dist_given_x"] = *l.logp_dist_given_x;
        if (l.predicted) rec["predicted"] = *l.predicted;
        out << rec.dump() << '\n';
    }
}

PviAnalysis import_scores(const ScoreFile& scores, const Dataset& data) {
    if (data.empty()) throw EmptyInputError("dataset is empty");
    std::unordered_map<std::string, const ScoreLine*> by_id;
    for (const auto& l : scores.lines) by_id.emplace(l.id, &l);

    std::vector<std::string> missing, extra;
    std::unordered_set<std::string> data_ids;
    for (const auto& inst : data.instances) {
        data_ids.insert(inst.id);
        if (!by_id.contains(inst.id)) missing.push_back(inst.id);
    }
    for (const auto& l : scores.lines)
        if (!data_ids.contains(l.id)) extra.push_back(l.id);
    if (!missing.empty() || !extra.empty()) {
        std::string msg = "score ids do not match dataset ids;";
        auto list = [&](const char* what, const std::vector<std::string>& ids) {
            if (ids.empty()) return;
            msg += std::string(" ") + what + " (" + std::to_string(ids.size()) + "):";
            for (std::size_t i = 0; i < ids.size() && i < 20; ++i) msg += " " + ids[i];
            if (ids.size() > 20) msg += " ...";
            msg += ";";
        };
        list("missing", missing);
        list("extra", extra);
        throw ValidationError(msg);
    }

    const double to_bits = scores.log_base == LogBase::e ? 1.0 / std::log(2.0) : 1.0;
    const double floor_bits = std::log2(kProbabilityFloor);
    auto convert = [&](double logp, const std::string& id) {
        if (std::isnan(logp)) throw ValidationError("id '" + id + "': log-probability is NaN");
        double bits = logp * to_bits;
        if (bits > 1e-9) throw ValidationError("id '" + id + "': log-probability implies p > 1");
        return std::clamp(bits, floor_bits, 0.0);
    };

    PviAnalysis out;
    out.records.reserve(data.size());
    for (const auto& inst : data.instances) {
        const ScoreLine& l = *by_id.at(inst.id);
        PviRecord r;
        r.id = inst.id;
        r.gold = inst.gold;
        r.logp_x_bits = convert(l.logp_gold_given_x, l.id);
        r.logp_null_bits = convert(l.logp_gold_null, l.id);
        r.pvi_bits = r.logp_x_bits - r.logp_null_bits;
        r.predicted = -1;
        if (l.logp_dist_given_x) {
            const auto& d = *l.logp_dist_given_x;
            if (d.size() != data.label_space.size())
                throw ValidationError("id '" + l.id + "': label distribution has the wrong length");
            std::vector<double> probs;
            for (double lp : d) probs.push_back(std::exp2(convert(lp, l.id)));
            r.predicted = CategoricalDistribution::from_probs(probs).argmax();
        } else if (l.predicted) {
            r.predicted = data.label_space.index_of(*l.predicted);
        } else if (r.logp_x_bits > -1.0) {
            r.predicted = r.gold;  // p(gold) > 1/2 makes gold the argmax
        }
        r.correct = r.predicted == r.gold;
        out.records.push_back(std::move(r));
    }
    out.summary = summarize(out.records);
    return out;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string csv_escape(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

void write_pvi_csv(std::span<const PviRecord> records, const LabelSpace& labels, std::ostream& out) {
    out << "id,gold,predicted,correct,pvi_bits,logp_x_bits,logp_null_bits\n";
    for (const auto& r : records) {
        out << csv_escape(r.id) << ',' << csv_escape(labels.name(r.gold)) << ','
            << (r.predicted >= 0 ? csv_escape(labels.name(r.predicted)) : std::string()) << ','
            << (r.correct ? 1 : 0) << ',' << format_real(r.pvi_bits) << ',' << format_real(r.logp_x_bits) << ','
            << format_real(r.logp_null_bits) << '\n';
    }
}

namespace {

double parse_real(const std::string& s, const std::string& ctx) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) throw ValidationError(ctx + "not a number: '" + s + "'");
    return v;
}

}  // namespace

std::vector<PviRecord> read_pvi_csv(std::istream& in, const LabelSpace* labels, const std::string& source) {
    std::string text;
    if (!std::getline(in, text)) throw ValidationError(source + ": empty PVI file");
    const auto header = split_csv_line(text);
    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* need : {"id", "gold", "predicted", "correct", "pvi_bits", "logp_x_bits", "logp_null_bits"})
        if (!col.contains(need)) throw ValidationError(source + ": missing column '" + std::string(need) + "'");

    std::vector<std::string> seen_labels;
    auto label_index = [&](const std::string& name, const std::string& ctx) -> LabelIndex {
        if (name.empty()) return -1;
        if (labels) {
            auto i = labels->find(name);
            if (!i) throw ValidationError(ctx + "unknown label '" + name + "'");
            return *i;
        }
        for (std::size_t i = 0; i < seen_labels.size(); ++i)
            if (seen_labels[i] == name) return static_cast<LabelIndex>(i);
        seen_labels.push_back(name);
        return static_cast<LabelIndex>(seen_labels.size() - 1);
    };

    std::vector<PviRecord> out;
    std::unordered_set<std::string> ids;
    std::size_t line = 1;
    while (std::getline(in, text)) {
        ++line;
        if (blank(text)) continue;
        const auto ctx = where(source, line);
        const auto cells = split_csv_line(text);
        if (cells.size() != header.size()) throw ValidationError(ctx + "wrong number of columns");
        PviRecord r;
        r.id = cells[col["id"]];
        if (!ids.insert(r.id).second) throw ValidationError(ctx + "duplicate id '" + r.id + "'");
        r.gold = label_index(cells[col["gold"]], ctx);
        r.predicted = label_index(cells[col["predicted"]], ctx);
        r.correct = cells[col["correct"]] == "1";
        r.pvi_bits = parse_real(cells[col["pvi_bits"]], ctx);
        r.logp_x_bits = parse_real(cells[col["logp_x_bits"]], ctx);
        r.logp_null_bits = parse_real(cells[col["logp_null_bits"]], ctx);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<PviRecord> read_pvi_csv(const std::filesystem::path& path, const LabelSpace* labels) {
    auto in = open_in(path);
    return read_pvi_csv(in, labels, path.string());
}

std::map<std::string, double> read_scalar_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::map<std::string, double> out;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (blank(text)) continue;
        const auto cells = split_csv_line(text);
        if (cells.size() != 2) throw ValidationError(where(path.string(), line) + "expected two columns (id,value)");
        double v = 0.0;
        const auto& s = cells[1];
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
            if (line == 1 && out.empty()) continue;  // header
            throw ValidationError(where(path.string(), line) + "not a number: '" + s + "'");
        }
        if (!out.emplace(cells[0], v).second)
            throw ValidationError(where(path.string(), line) + "duplicate id '" + cells[0] + "'");
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace vinfo
