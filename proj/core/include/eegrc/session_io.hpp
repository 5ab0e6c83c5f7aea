#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eegrc/signal.hpp"
#include "eegrc/types.hpp"

namespace eegrc {

// Session directory layout:
//   manifest         JSON: participant_id, rate_hz, channels, n_samples, file names
//   signals.f32le    channel-major little-endian float32, µV
//   triggers.csv     sample_index,code,trial_id,word_index
//   labels.csv       trial_id,word_index,word_type,sentence_relevance
//   trials.csv       trial_id,question_id (optional)
void write_session(const SessionRecording& rec, const std::filesystem::path& dir);
SessionRecording read_session(const std::filesystem::path& dir);

// Epoch archive layout:
//   manifest         JSON: rate_hz, t0_ms, n_samples, channels, count
//   epochs.csv       index,participant_id,trial_id,word_index,question_id,word_type,sentence_relevance
//   epochs.f32le     per epoch, channel-major float32 block in index order
void write_epoch_archive(const std::vector<EpochMatrix>& epochs, const std::filesystem::path& dir);
std::vector<EpochMatrix> read_epoch_archive(const std::filesystem::path& dir);

void write_rejection_report(const PreprocessResult& result, const std::filesystem::path& path);

// Little-endian float32 helpers shared by the archive writers.
void write_f32le(std::ostream& out, const Eigen::MatrixXd& channel_major);
void read_f32le(std::istream& in, Eigen::MatrixXd& channel_major, const std::string& what);

/// Minimal CSV reader for the comma-separated, unquoted tables used here.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws DataError
};
CsvTable read_csv(const std::filesystem::path& path);

int parse_int(std::string_view s, std::string_view what);
double parse_double(std::string_view s, std::string_view what);

}  // namespace eegrc
