#include "phishguard/email/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "phishguard/errors.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::email {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  require(!in.bad(), Errc::IoFailure, "read failed for " + path.string());
  return buf.str();
}

CorpusLabel label_from_path(const std::filesystem::path& path) {
  for (const auto& part : path) {
    std::string p = text::to_lower(part.string());
    if (p.find("phish") != std::string::npos) return CorpusLabel::Phishing;
    if (p.find("legit") != std::string::npos) return CorpusLabel::Legitimate;
    /* "ham" before "spam": corpora named spamassassin_ham contain both */
    if (p.find("ham") != std::string::npos) return CorpusLabel::Legitimate;
    if (p.find("spam") != std::string::npos) return CorpusLabel::Phishing;
  }
  return CorpusLabel::Unlabeled;
}

std::vector<RawEmail> load_eml_dir(const std::filesystem::path& dir, const LoadOptions& options) {
  require(std::filesystem::is_directory(dir), Errc::IoFailure,
          dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RawEmail> out;
  out.reserve(files.size());
  for (const auto& file : files) {
    RawEmail raw;
    raw.source_id = std::filesystem::relative(file, dir).generic_string();
    raw.bytes = read_file(file);
    raw.label = options.label_override.value_or(label_from_path(file));
    out.push_back(std::move(raw));
  }
  return out;
}

std::vector<RawEmail> load_mbox(const std::filesystem::path& path, const LoadOptions& options) {
  std::string data = read_file(path);
  std::vector<std::string> lines = text::split_lines(data);
  require(!lines.empty() && lines[0].rfind("From ", 0) == 0, Errc::FormatMismatch,
          path.string() + " does not start with an mbox From line");
  CorpusLabel label = options.label_override.value_or(label_from_path(path));
  std::vector<RawEmail> out;
  std::vector<std::string> current;
  bool prev_blank = true;
  std::size_t index = 0;
  auto flush = [&] {
    if (current.empty()) return;
    RawEmail raw;
    raw.source_id = path.filename().string() + "#" + std::to_string(index++);
    raw.bytes = text::join(current, "\n");
    raw.label = label;
    out.push_back(std::move(raw));
    current.clear();
  };
  for (const std::string& line : lines) {
    if (line.rfind("From ", 0) == 0 && prev_blank) {
      flush();
      prev_blank = false;
      continue;  // separator line is not part of the message
    }
    if (line.rfind(">From ", 0) == 0) {
      current.push_back(line.substr(1));
    } else {
      current.push_back(line);
    }
    prev_blank = line.empty();
  }
  flush();
  require(!out.empty(), Errc::FormatMismatch, path.string() + " contains no messages");
  return out;
}

std::vector<RawEmail> load_csv(const std::filesystem::path& path, const LoadOptions& options) {
  std::string data = read_file(path);
  auto rows = parse_csv(data);
  require(!rows.empty(), Errc::FormatMismatch, path.string() + " is empty");
  const auto& header = rows[0];
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (text::iequals(text::trim(header[i]), name)) return i;
    return std::nullopt;
  };
  auto body_col = column(options.body_column);
  require(body_col.has_value(), Errc::FormatMismatch,
          path.string() + " has no '" + options.body_column + "' column");
  auto subject_col = column(options.subject_column);
  auto sender_col = column(options.sender_column);
  auto label_col = column(options.label_column);

  std::vector<RawEmail> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && text::trim(row[0]).empty()) continue;
    auto cell = [&](std::optional<std::size_t> col) -> std::string {
      if (!col || *col >= row.size()) return "";
      return row[*col];
    };
    std::string message;
    std::string sender = cell(sender_col);
    std::string subject = cell(subject_col);
    if (!sender.empty()) message += "From: " + sender + "\n";
    message += "Subject: " + subject + "\n\n";
    message += cell(body_col);
    RawEmail raw;
    raw.source_id = path.filename().string() + "#" + std::to_string(r);
    raw.bytes = std::move(message);
    if (options.label_override) {
      raw.label = *options.label_override;
    } else if (label_col) {
      std::string value = text::trim(cell(label_col));
      raw.label = value.empty() ? CorpusLabel::Unlabeled : corpus_label_from_string(value);
    } else {
      raw.label = label_from_path(path);
    }
    out.push_back(std::move(raw));
  }
  require(!out.empty(), Errc::FormatMismatch, path.string() + " contains no records");
  return out;
}

}  // namespace

CorpusFormat corpus_format_from_string(const std::string& s) {
  std::string v = text::to_lower(text::trim(s));
  if (v == "auto" || v.empty()) return CorpusFormat::Auto;
  if (v == "eml" || v == "emldir" || v == "dir") return CorpusFormat::EmlDir;
  if (v == "mbox") return CorpusFormat::Mbox;
  if (v == "csv") return CorpusFormat::Csv;
  raise(Errc::ConfigError, "unknown corpus format '" + s + "'");
}

std::vector<std::vector<std::string>> parse_csv(std::string_view data) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  while (i < data.size()) {
    char c = data[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        continue;
      }
      field.push_back(c);
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        ++i;
        break;
      case ',':
        end_field();
        ++i;
        break;
      case '\r':
        ++i;
        break;
      case '\n':
        end_row();
        ++i;
        break;
      default:
        field.push_back(c);
        ++i;
        break;
    }
  }
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

std::vector<RawEmail> load_corpus(const std::filesystem::path& path, CorpusFormat format,
                                  const LoadOptions& options) {
  require(std::filesystem::exists(path), Errc::IoFailure, path.string() + " does not exist");
  if (format == CorpusFormat::Auto) {
    if (std::filesystem::is_directory(path)) {
      format = CorpusFormat::EmlDir;
    } else {
      std::string ext = text::to_lower(path.extension().string());
      if (ext == ".mbox") format = CorpusFormat::Mbox;
      else if (ext == ".csv") format = CorpusFormat::Csv;
      else if (ext == ".eml" || ext == ".txt") {
        RawEmail raw;
        raw.source_id = path.filename().string();
        raw.bytes = read_file(path);
        raw.label = options.label_override.value_or(label_from_path(path));
        return {std::move(raw)};
      } else {
        raise(Errc::FormatMismatch, "cannot infer corpus format for " + path.string());
      }
    }
  }
  switch (format) {
    case CorpusFormat::EmlDir: return load_eml_dir(path, options);
    case CorpusFormat::Mbox: return load_mbox(path, options);
    case CorpusFormat::Csv: return load_csv(path, options);
    case CorpusFormat::Auto: break;
  }
  raise(Errc::ConfigError, "unreachable corpus format");
}

}  // namespace phishguard::email
