#include "eegrc/session_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eegrc/error.hpp"

namespace eegrc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSessionFormatVersion = 1;
constexpr int kEpochFormatVersion = 1;

std::ofstream open_out(const fs::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw DataError("cannot read " + path.string());
  return in;
}

json read_manifest(const fs::path& dir, std::string_view format) {
  auto in = open_in(dir / "manifest");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("malformed manifest in " + dir.string() + ": " + e.what());
  }
  if (doc.value("format", "") != format)
    throw DataError(dir.string() + " is not a " + std::string(format) + " directory");
  return doc;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError("bad integer '" + std::string(s) + "' for " + std::string(what));
  return v;
}

double parse_double(std::string_view s, std::string_view what) {
  try {
    std::size_t used = 0;
    const std::string str(s);
    const double v = std::stod(str, &used);
    if (used != str.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw DataError("bad number '" + std::string(s) + "' for " + std::string(what));
  }
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DataError("CSV is missing column '" + std::string(name) + "'");
}

CsvTable read_csv(const fs::path& path) {
  auto in = open_in(path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + " is empty");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != table.header.size())
      throw DataError(path.string() + ": row has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(table.header.size()));
    table.rows.push_back(std::move(fields));
  }
  return table;
}

void write_f32le(std::ostream& out, const Eigen::MatrixXd& data) {
  std::vector<char> buf(static_cast<std::size_t>(data.cols()) * 4);
  for (Eigen::Index c = 0; c < data.rows(); ++c) {
    for (Eigen::Index i = 0; i < data.cols(); ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(data(c, i)));
      for (int b = 0; b < 4; ++b)
        buf[static_cast<std::size_t>(i) * 4 + static_cast<std::size_t>(b)] =
            static_cast<char>((bits >> (8 * b)) & 0xFFu);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

void read_f32le(std::istream& in, Eigen::MatrixXd& data, const std::string& what) {
  std::vector<unsigned char> buf(static_cast<std::size_t>(data.cols()) * 4);
  for (Eigen::Index c = 0; c < data.rows(); ++c) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      throw DataError(what + ": signal file shorter than the manifest declares");
    for (Eigen::Index i = 0; i < data.cols(); ++i) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b)
        bits |= static_cast<std::uint32_t>(buf[static_cast<std::size_t>(i) * 4 +
                                               static_cast<std::size_t>(b)])
                << (8 * b);
      const float v = std::bit_cast<float>(bits);
      if (!std::isfinite(v))
        throw DataError(what + ": non-finite sample in channel " + std::to_string(c));
      data(c, i) = v;
    }
  }
}

void write_session(const SessionRecording& rec, const fs::path& dir) {
  rec.validate();
  fs::create_directories(dir);

  json manifest = {
      {"format", "eegrc-session"},
      {"version", kSessionFormatVersion},
      {"participant_id", rec.participant_id},
      {"rate_hz", rec.rate_hz},
      {"n_samples", rec.n_samples()},
      {"channels", rec.channel_names},
      {"files",
       {{"signals", "signals.f32le"},
        {"triggers", "triggers.csv"},
        {"labels", "labels.csv"},
        {"trials", "trials.csv"}}},
  };
  open_out(dir / "manifest") << manifest.dump(2) << '\n';

  {
    auto out = open_out(dir / "signals.f32le", true);
    write_f32le(out, rec.data);
  }
  {
    auto out = open_out(dir / "triggers.csv");
    out << "sample_index,code,trial_id,word_index\n";
    for (const auto& t : rec.triggers) {
      out << t.sample_index << ',' << to_string(t.code) << ',' << t.trial_id << ',';
      if (t.word_index) out << *t.word_index;
      out << '\n';
    }
  }
  {
    auto out = open_out(dir / "labels.csv");
    out << "trial_id,word_index,word_type,sentence_relevance\n";
    for (const auto& l : rec.labels)
      out << l.trial_id << ',' << l.word_index << ',' << to_string(l.word_type) << ','
          << to_string(l.sentence_relevance) << '\n';
  }
  {
    auto out = open_out(dir / "trials.csv");
    out << "trial_id,question_id\n";
    for (const auto& [trial, question] : rec.trial_questions)
      out << trial << ',' << question << '\n';
  }
}

SessionRecording read_session(const fs::path& dir) {
  const json manifest = read_manifest(dir, "eegrc-session");
  SessionRecording rec;
  try {
    rec.participant_id = manifest.at("participant_id").get<std::string>();
    rec.rate_hz = manifest.at("rate_hz").get<double>();
    rec.channel_names = manifest.at("channels").get<std::vector<std::string>>();
    const auto n_samples = manifest.at("n_samples").get<Eigen::Index>();
    rec.data.resize(static_cast<Eigen::Index>(rec.channel_names.size()), n_samples);
  } catch (const json::exception& e) {
    throw DataError("manifest in " + dir.string() + ": " + e.what());
  }
  const json files = manifest.value("files", json::object());
  auto file = [&](const char* key, const char* fallback) {
    return dir / files.value(key, std::string(fallback));
  };

  {
    auto in = open_in(file("signals", "signals.f32le"), true);
    read_f32le(in, rec.data, dir.string());
    in.peek();
    if (!in.eof()) throw DataError(dir.string() + ": signal file longer than declared");
  }

  const auto triggers = read_csv(file("triggers", "triggers.csv"));
  const auto c_sample = triggers.column("sample_index");
  const auto c_code = triggers.column("code");
  const auto c_trial = triggers.column("trial_id");
  const auto c_word = triggers.column("word_index");
  for (const auto& row : triggers.rows) {
    TriggerEvent t;
    t.sample_index = parse_int(row[c_sample], "sample_index");
    t.code = parse_event_code(row[c_code]);
    t.trial_id = parse_int(row[c_trial], "trial_id");
    if (!row[c_word].empty()) t.word_index = parse_int(row[c_word], "word_index");
    rec.triggers.push_back(t);
  }

  const auto trials_path = file("trials", "trials.csv");
  if (fs::exists(trials_path)) {
    const auto trials = read_csv(trials_path);
    const auto c_t = trials.column("trial_id");
    const auto c_q = trials.column("question_id");
    for (const auto& row : trials.rows)
      rec.trial_questions.emplace_back(parse_int(row[c_t], "trial_id"),
                                       parse_int(row[c_q], "question_id"));
  }

  const auto labels = read_csv(file("labels", "labels.csv"));
  const auto l_trial = labels.column("trial_id");
  const auto l_word = labels.column("word_index");
  const auto l_type = labels.column("word_type");
  const auto l_rel = labels.column("sentence_relevance");
  for (const auto& row : labels.rows) {
    WordLabel l;
    l.trial_id = parse_int(row[l_trial], "trial_id");
    l.word_index = parse_int(row[l_word], "word_index");
    l.word_type = parse_word_type(row[l_type]);
    l.sentence_relevance = parse_relevance(row[l_rel]);
    l.participant_id = rec.participant_id;
    l.question_id = rec.question_of(l.trial_id);
    rec.labels.push_back(l);
  }

  rec.validate();
  return rec;
}

void write_epoch_archive(const std::vector<EpochMatrix>& epochs, const fs::path& dir) {
  fs::create_directories(dir);
  json manifest = {{"format", "eegrc-epochs"}, {"version", kEpochFormatVersion},
                   {"count", epochs.size()}};
  if (!epochs.empty()) {
    const auto& first = epochs.front();
    manifest["rate_hz"] = first.rate_hz;
    manifest["t0_ms"] = first.t0_ms;
    manifest["n_samples"] = first.n_samples();
    manifest["channels"] = first.channel_names;
  }
  for (const auto& e : epochs) {
    if (e.n_samples() != epochs.front().n_samples() ||
        e.channel_names != epochs.front().channel_names || e.rate_hz != epochs.front().rate_hz ||
        e.t0_ms != epochs.front().t0_ms)
      throw DataError("epochs in one archive must share rate, span and montage");
  }
  open_out(dir / "manifest") << manifest.dump(2) << '\n';

  auto csv = open_out(dir / "epochs.csv");
  csv << "index,participant_id,trial_id,word_index,question_id,word_type,sentence_relevance\n";
  auto bin = open_out(dir / "epochs.f32le", true);
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const auto& l = epochs[i].label;
    csv << i << ',' << l.participant_id << ',' << l.trial_id << ',' << l.word_index << ','
        << l.question_id << ',' << to_string(l.word_type) << ','
        << to_string(l.sentence_relevance) << '\n';
    write_f32le(bin, epochs[i].data);
  }
}

std::vector<EpochMatrix> read_epoch_archive(const fs::path& dir) {
  const json manifest = read_manifest(dir, "eegrc-epochs");
  const auto count = manifest.at("count").get<std::size_t>();
  std::vector<EpochMatrix> epochs;
  if (count == 0) return epochs;

  EpochMatrix proto;
  try {
    proto.rate_hz = manifest.at("rate_hz").get<double>();
    proto.t0_ms = manifest.at("t0_ms").get<double>();
    proto.channel_names = manifest.at("channels").get<std::vector<std::string>>();
    proto.data.resize(static_cast<Eigen::Index>(proto.channel_names.size()),
                      manifest.at("n_samples").get<Eigen::Index>());
  } catch (const json::exception& e) {
    throw DataError("epoch manifest in " + dir.string() + ": " + e.what());
  }

  const auto table = read_csv(dir / "epochs.csv");
  if (table.rows.size() != count) throw DataError("epochs.csv row count mismatch");
  const auto c_pid = table.column("participant_id");
  const auto c_trial = table.column("trial_id");
  const auto c_word = table.column("word_index");
  const auto c_q = table.column("question_id");
  const auto c_type = table.column("word_type");
  const auto c_rel = table.column("sentence_relevance");

  auto bin = open_in(dir / "epochs.f32le", true);
  epochs.reserve(count);
  for (const auto& row : table.rows) {
    EpochMatrix e = proto;
    e.label.participant_id = row[c_pid];
    e.label.trial_id = parse_int(row[c_trial], "trial_id");
    e.label.word_index = parse_int(row[c_word], "word_index");
    e.label.question_id = parse_int(row[c_q], "question_id");
    e.label.word_type = parse_word_type(row[c_type]);
    e.label.sentence_relevance = parse_relevance(row[c_rel]);
    read_f32le(bin, e.data, dir.string());
    epochs.push_back(std::move(e));
  }
  return epochs;
}

void write_rejection_report(const PreprocessResult& result, const fs::path& path) {
  auto out = open_out(path);
  out << "participant_id,trial_id,word_index,word_type,status,peak_uv\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& r : result.rejected)
    out << r.label.participant_id << ',' << r.label.trial_id << ',' << r.label.word_index << ','
        << to_string(r.label.word_type) << ",rejected," << r.peak_uv << '\n';
  for (const auto& s : result.skipped)
    out << ',' << s.trial_id << ',' << s.word_index << ",,skipped,\n";
}

}  // namespace eegrc
