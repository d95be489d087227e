#pragma once

#include <charconv>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fairpoison/errors.hpp"
#include "fairpoison/schema.hpp"
#include "fairpoison/types.hpp"

namespace fairpoison {

/// RFC-4180-style CSV split: comma separated, optional double-quoted fields
/// with "" escapes, CRLF or LF records. Returns one vector of fields per
/// record; a trailing newline does not produce an empty record.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;  // a comma implies a following (possibly empty) field
        break;
      case '\r':
        break;
      case '\n':
        if (!row.empty() || !field.empty() || field_started) end_row();
        break;
      default:
        field.push_back(c);
        field_started = true;
        break;
    }
  }
  if (in_quotes) throw DataError("csv: unterminated quoted field");
  if (!row.empty() || !field.empty() || field_started) end_row();
  return rows;
}

namespace detail {
inline bool parse_double(std::string_view s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (*begin == '+') ++begin;  // from_chars rejects a leading '+'
  auto [p, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && p == end;
}
}  // namespace detail

/// Decodes CSV text against a schema. Numeric features parse as reals;
/// categorical ones are one-hot encoded with categories ordered by first
/// appearance (generated columns are named "<column>=<value>"). The label
/// maps to +1 iff it equals positive_label_value, the group flag to 1 iff
/// the sensitive value equals advantaged_value. Row order is preserved.
inline Dataset load_csv(std::string_view csv_text, const DatasetSchema& schema) {
  const auto rows = parse_csv(csv_text);
  if (rows.empty()) throw DataError("csv: no header row");
  const auto& header = rows.front();

  std::unordered_map<std::string, std::size_t> col_index;
  for (std::size_t j = 0; j < header.size(); ++j) {
    auto [it, inserted] = col_index.emplace(header[j], j);
    (void)it;
    if (!inserted) {
      // Only referenced names need to be unambiguous.
      const std::string& name = header[j];
      const bool referenced =
          name == schema.label_column || name == schema.sensitive_column ||
          std::any_of(schema.feature_columns.begin(), schema.feature_columns.end(),
                      [&](const FeatureDecl& f) { return f.name == name; });
      if (referenced) throw DataError("csv: duplicate header column '" + name + "'");
    }
  }
  auto find_col = [&](const std::string& name) {
    auto it = col_index.find(name);
    if (it == col_index.end()) throw DataError("csv: missing column '" + name + "'");
    return it->second;
  };

  const std::size_t label_col = find_col(schema.label_column);
  const std::size_t sens_col = find_col(schema.sensitive_column);
  std::vector<std::size_t> feat_cols;
  for (const auto& f : schema.feature_columns) feat_cols.push_back(find_col(f.name));
  for (const auto& d : schema.drop_columns) find_col(d);

  if (rows.size() < 2) throw DataError("csv: no data rows");

  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw DataError("csv: row " + std::to_string(r) + " has " +
                      std::to_string(rows[r].size()) + " fields, header has " +
                      std::to_string(header.size()));
  }

  // First pass: category vocabularies in first-appearance order.
  std::vector<std::vector<std::string>> categories(schema.feature_columns.size());
  for (std::size_t fi = 0; fi < schema.feature_columns.size(); ++fi) {
    if (schema.feature_columns[fi].kind != FeatureKind::categorical) continue;
    auto& cats = categories[fi];
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const std::string& v = rows[r][feat_cols[fi]];
      if (std::find(cats.begin(), cats.end(), v) == cats.end()) cats.push_back(v);
    }
  }

  Dataset ds;
  std::vector<Eigen::Index> feat_offset(schema.feature_columns.size());
  for (std::size_t fi = 0; fi < schema.feature_columns.size(); ++fi) {
    const auto& f = schema.feature_columns[fi];
    feat_offset[fi] = static_cast<Eigen::Index>(ds.feature_names.size());
    if (f.kind == FeatureKind::numeric) {
      ds.feature_names.push_back(f.name);
      ds.numeric_feature.push_back(true);
    } else {
      for (const auto& c : categories[fi]) {
        ds.feature_names.push_back(f.name + "=" + c);
        ds.numeric_feature.push_back(false);
      }
    }
  }
  const Eigen::Index d = static_cast<Eigen::Index>(ds.feature_names.size());

  for (std::size_t r = 1; r < rows.size(); ++r) {
    LabeledPoint p;
    p.x = Eigen::VectorXd::Zero(d);
    for (std::size_t fi = 0; fi < schema.feature_columns.size(); ++fi) {
      const auto& f = schema.feature_columns[fi];
      const std::string& cell = rows[r][feat_cols[fi]];
      if (f.kind == FeatureKind::numeric) {
        double v = 0.0;
        if (!detail::parse_double(cell, v))
          throw DataError("csv: row " + std::to_string(r) + ", column '" + f.name +
                          "': cannot parse numeric value '" + cell + "'");
        p.x[feat_offset[fi]] = v;
      } else {
        const auto& cats = categories[fi];
        const auto it = std::find(cats.begin(), cats.end(), cell);
        p.x[feat_offset[fi] + (it - cats.begin())] = 1.0;
      }
    }
    p.y = rows[r][label_col] == schema.positive_label_value ? 1 : -1;
    p.z = rows[r][sens_col] == schema.advantaged_value ? 1 : 0;
    ds.points.push_back(std::move(p));
  }

  validate_dataset(ds);
  return ds;
}

}  // namespace fairpoison
