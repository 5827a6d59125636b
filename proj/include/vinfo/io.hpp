#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vinfo/dataset.hpp"
#include "vinfo/estimation.hpp"

namespace vinfo {

// Dataset files are JSON lines. The first record is a header
//   {"schema": ["premise", "hypothesis"], "labels": ["entailment", ...], "split": "test"}
// and every following record is
//   {"id": "...", "fields": {"premise": "...", "hypothesis": "..."}, "label": "entailment"}
// Errors cite the 1-based line number.
Dataset read_dataset(std::istream& in, const std::string& source = "<stream>");
Dataset read_dataset(const std::filesystem::path& path);
void write_dataset(const Dataset& data, std::ostream& out);
void write_dataset(const Dataset& data, const std::filesystem::path& path);

enum class LogBase { two, e };

struct ScoreLine {
    std::string id;
    double logp_gold_given_x = 0.0;
    double logp_gold_null = 0.0;
    std::optional<std::vector<double>> logp_dist_given_x;  // aligned with the label space
    std::optional<std::string> predicted;                   // label name

    bool operator==(const ScoreLine&) const = default;
};

// Externally computed per-instance log-probabilities, JSON lines. An optional header
// {"format": "vinfo-scores", "log_base": "e", "model": {...}} may precede the score
// lines; "log_base" and "model" may also appear on each score line, but they must
// agree everywhere and log_base must be declared somewhere.
struct ScoreFile {
    LogBase log_base = LogBase::e;
    nlohmann::json model = nlohmann::json::object();
    std::vector<ScoreLine> lines;

    bool operator==(const ScoreFile&) const = default;
};

ScoreFile read_score_file(std::istream& in, const std::string& source = "<stream>");
ScoreFile read_score_file(const std::filesystem::path& path);
void write_score_file(const ScoreFile& scores, std::ostream& out);

// Converts to bits, applies the probability floor, and builds one record per
// dataset instance (dataset order). Score ids must cover the dataset ids exactly.
PviAnalysis import_scores(const ScoreFile& scores, const Dataset& data);

// PVI CSV: id,gold,predicted,correct,pvi_bits,logp_x_bits,logp_null_bits.
// Reals use the shortest representation that reads back to the same double.
void write_pvi_csv(std::span<const PviRecord> records, const LabelSpace& labels, std::ostream& out);
// Label names are mapped through `labels` when given, else indexed by first appearance.
std::vector<PviRecord> read_pvi_csv(std::istream& in, const LabelSpace* labels = nullptr,
                                    const std::string& source = "<stream>");
std::vector<PviRecord> read_pvi_csv(const std::filesystem::path& path, const LabelSpace* labels = nullptr);

// Two-column CSV (id,value); a non-numeric first row is treated as a header.
std::map<std::string, double> read_scalar_csv(const std::filesystem::path& path);

std::string format_real(double x);
std::string csv_escape(std::string_view s);
std::vector<std::string> split_csv_line(std::string_view line);

// Writes via a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace vinfo
