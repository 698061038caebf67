// Copyright 2026 The maskdet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "maskdet/dataset.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "maskdet/rng.h"

namespace maskdet {
namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

[[noreturn]] void reject(const std::string& path, const std::string& what) {
  throw std::invalid_argument("voc xml: " + path + ": " + what);
}

const pt::ptree& child(const pt::ptree& node, const std::string& name,
                       const std::string& path) {
  auto c = node.get_child_optional(name);
  if (!c) reject(path + "." + name, "missing element");
  return *c;
}

std::string text_of(const pt::ptree& node, const std::string& name, const std::string& path) {
  return trim(child(node, name, path).data());
}

// Integer pixel value; decimal forms such as "48.0" are rounded.
int int_of(const pt::ptree& node, const std::string& name, const std::string& path) {
  const std::string s = text_of(node, name, path);
  const std::string where = path + "." + name;
  if (s.empty()) reject(where, "empty value");
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    reject(where, "not a number: '" + s + "'");
  }
  if (pos != s.size() || !std::isfinite(v)) reject(where, "not a number: '" + s + "'");
  if (std::fabs(v) > 1e9) reject(where, "value out of range: '" + s + "'");
  return static_cast<int>(std::lround(v));
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string Annotation::image_id() const {
  return std::filesystem::path(filename).stem().string();
}

void Annotation::validate() const {
  if (width <= 0 || height <= 0 || depth <= 0) {
    throw std::invalid_argument("annotation " + filename + ": size must be positive");
  }
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    if (!(0 <= o.xmin && o.xmin < o.xmax && o.xmax <= width && 0 <= o.ymin &&
          o.ymin < o.ymax && o.ymax <= height)) {
      throw std::invalid_argument("annotation " + filename + ": object[" + std::to_string(i) +
                                  "] box outside frame or inverted");
    }
  }
}

Annotation parse_voc_xml(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw std::invalid_argument("voc xml: malformed XML at line " + std::to_string(e.line()) +
                                ": " + e.message());
  }
  const std::string root = "annotation";
  const pt::ptree& ann = child(tree, root, "");
  const std::string root_path = root;

  Annotation a;
  a.filename = text_of(ann, "filename", root_path);
  if (a.filename.empty()) reject(root_path + ".filename", "empty value");
  const std::string size_path = root_path + ".size";
  const pt::ptree& size = child(ann, "size", root_path);
  a.width = int_of(size, "width", size_path);
  a.height = int_of(size, "height", size_path);
  a.depth = size.get_child_optional("depth") ? int_of(size, "depth", size_path) : 3;
  if (a.width <= 0) reject(size_path + ".width", "must be positive");
  if (a.height <= 0) reject(size_path + ".height", "must be positive");
  if (a.depth <= 0) reject(size_path + ".depth", "must be positive");

  int index = 0;
  for (const auto& [tag, node] : ann) {
    if (tag != "object") continue;
    const std::string path = root_path + ".object[" + std::to_string(index++) + "]";
    ObjectBox o;
    o.name = text_of(node, "name", path);
    if (o.name.empty()) reject(path + ".name", "empty value");
    const std::string bb = path + ".bndbox";
    const pt::ptree& box = child(node, "bndbox", path);
    o.xmin = int_of(box, "xmin", bb);
    o.ymin = int_of(box, "ymin", bb);
    o.xmax = int_of(box, "xmax", bb);
    o.ymax = int_of(box, "ymax", bb);
    if (o.xmin >= o.xmax) reject(bb, "xmin >= xmax (" + std::to_string(o.xmin) + " >= " + std::to_string(o.xmax) + ")");
    if (o.ymin >= o.ymax) reject(bb, "ymin >= ymax (" + std::to_string(o.ymin) + " >= " + std::to_string(o.ymax) + ")");
    if (o.xmin < 0 || o.ymin < 0) reject(bb, "negative corner");
    if (o.xmax > a.width) reject(bb + ".xmax", "exceeds image width " + std::to_string(a.width));
    if (o.ymax > a.height) reject(bb + ".ymax", "exceeds image height " + std::to_string(a.height));
    a.objects.push_back(std::move(o));
  }
  return a;
}

std::string write_voc_xml(const Annotation& a) {
  std::string s = "<annotation><filename>" + xml_escape(a.filename) + "</filename><size><width>" +
                  std::to_string(a.width) + "</width><height>" + std::to_string(a.height) +
                  "</height><depth>" + std::to_string(a.depth) + "</depth></size>";
  for (const auto& o : a.objects) {
    s += "<object><name>" + xml_escape(o.name) + "</name><bndbox><xmin>" +
         std::to_string(o.xmin) + "</xmin><ymin>" + std::to_string(o.ymin) + "</ymin><xmax>" +
         std::to_string(o.xmax) + "</xmax><ymax>" + std::to_string(o.ymax) +
         "</ymax></bndbox></object>";
  }
  return s + "</annotation>";
}

Annotation load_voc_xml(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_voc_xml(ss.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

std::vector<std::filesystem::path> list_annotation_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error(dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".xml") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

void to_json(nlohmann::json& j, const Annotation& a) {
  j = nlohmann::json{{"filename", a.filename},
                     {"width", a.width},
                     {"height", a.height},
                     {"depth", a.depth},
                     {"objects", nlohmann::json::array()}};
  for (const auto& o : a.objects) {
    j["objects"].push_back({{"name", o.name}, {"bbox", {o.xmin, o.ymin, o.xmax, o.ymax}}});
  }
}

void from_json(const nlohmann::json& j, Annotation& a) {
  a.filename = j.at("filename").get<std::string>();
  a.width = j.at("width").get<int>();
  a.height = j.at("height").get<int>();
  a.depth = j.at("depth").get<int>();
  a.objects.clear();
  for (const auto& o : j.at("objects")) {
    auto bb = o.at("bbox").get<std::vector<int>>();
    if (bb.size() != 4) throw std::invalid_argument("annotation json: bbox needs 4 values");
    a.objects.push_back({o.at("name").get<std::string>(), bb[0], bb[1], bb[2], bb[3]});
  }
}

// ---- label map ----

void LabelMap::add(int id, const std::string& name) {
  if (id <= 0) throw std::invalid_argument("label map: id must be positive, got " + std::to_string(id));
  if (name.empty()) throw std::invalid_argument("label map: empty name for id " + std::to_string(id));
  if (by_id_.count(id)) throw std::invalid_argument("label map: duplicate id " + std::to_string(id));
  if (by_name_.count(name)) throw std::invalid_argument("label map: duplicate name '" + name + "'");
  by_id_[id] = name;
  by_name_[name] = id;
}

std::optional<int> LabelMap::id_of(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> LabelMap::name_of(int id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> LabelMap::class_names() const {
  std::vector<std::string> names(max_id() + 1);
  names[0] = "background";
  for (int i = 1; i <= max_id(); ++i) names[i] = name_of(i).value_or(std::to_string(i));
  return names;
}

LabelMap LabelMap::mask_default() {
  LabelMap m;
  m.add(1, "Mask");
  m.add(2, "NoMask");
  return m;
}

namespace {

struct Token {
  enum Kind { kIdent, kInt, kString, kLBrace, kRBrace, kColon, kEnd } kind;
  std::string text;
  int line;
};

class PbtxtLexer {
 public:
  explicit PbtxtLexer(std::string_view s) : s_(s) {}

  Token next() {
    skip();
    if (pos_ >= s_.size()) return {Token::kEnd, "", line_};
    const char c = s_[pos_];
    if (c == '{') return single(Token::kLBrace);
    if (c == '}') return single(Token::kRBrace);
    if (c == ':') return single(Token::kColon);
    if (c == '\'' || c == '"') {
      const int line = line_;
      std::string out;
      ++pos_;
      while (pos_ < s_.size() && s_[pos_] != c) {
        if (s_[pos_] == '\n') fail("unterminated string");
        if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
        out += s_[pos_++];
      }
      if (pos_ >= s_.size()) fail("unterminated string");
      ++pos_;
      return {Token::kString, out, line};
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      std::string out(1, c);
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) out += s_[pos_++];
      if (out == "-") fail("stray '-'");
      return {Token::kInt, out, line_};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string out;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        out += s_[pos_++];
      }
      return {Token::kIdent, out, line_};
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("label map: line " + std::to_string(line_) + ": " + what);
  }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }
  Token single(Token::Kind k) { return {k, std::string(1, s_[pos_++]), line_}; }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

LabelMap parse_label_map(std::string_view text, std::vector<std::string>* warnings) {
  PbtxtLexer lex(text);
  LabelMap map;
  auto expect = [&](Token::Kind k, const char* what) {
    Token t = lex.next();
    if (t.kind != k) {
      throw std::invalid_argument("label map: line " + std::to_string(t.line) + ": expected " +
                                  what + ", got '" + t.text + "'");
    }
    return t;
  };
  for (;;) {
    Token t = lex.next();
    if (t.kind == Token::kEnd) break;
    if (t.kind != Token::kIdent || t.text != "item") {
      throw std::invalid_argument("label map: line " + std::to_string(t.line) +
                                  ": expected 'item', got '" + t.text + "'");
    }
    const int item_line = t.line;
    expect(Token::kLBrace, "'{'");
    std::optional<long long> id;
    std::optional<std::string> name;
    for (;;) {
      Token key = lex.next();
      if (key.kind == Token::kRBrace) break;
      if (key.kind != Token::kIdent) {
        throw std::invalid_argument("label map: line " + std::to_string(key.line) +
                                    ": expected field name or '}', got '" + key.text + "'");
      }
      expect(Token::kColon, "':'");
      Token value = lex.next();
      if (key.text == "id") {
        if (value.kind != Token::kInt || value.text.size() > 10) {
          throw std::invalid_argument("label map: line " + std::to_string(value.line) +
                                      ": id must be an integer");
        }
        if (id) throw std::invalid_argument("label map: line " + std::to_string(key.line) + ": repeated id field");
        id = std::stoll(value.text);
      } else if (key.text == "name") {
        if (value.kind != Token::kString) {
          throw std::invalid_argument("label map: line " + std::to_string(value.line) +
                                      ": name must be a quoted string");
        }
        if (name) throw std::invalid_argument("label map: line " + std::to_string(key.line) + ": repeated name field");
        name = value.text;
      } else if (value.kind != Token::kInt && value.kind != Token::kString &&
                 value.kind != Token::kIdent) {
        throw std::invalid_argument("label map: line " + std::to_string(value.line) +
                                    ": unsupported value for '" + key.text + "'");
      }
    }
    if (!id || !name) {
      throw std::invalid_argument("label map: item at line " + std::to_string(item_line) +
                                  " needs both id and name");
    }
    if (*id <= 0 || *id > 1'000'000'000) {
      throw std::invalid_argument("label map: item at line " + std::to_string(item_line) +
                                  ": id must be positive, got " + std::to_string(*id));
    }
    map.add(static_cast<int>(*id), *name);
  }
  if (map.empty() && warnings) warnings->push_back("label map has no items");
  return map;
}

LabelMap load_label_map(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_label_map(ss.str(), warnings);
}

// ---- split & stats ----

DatasetSplit split_dataset(std::vector<std::string> ids, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw std::invalid_argument("split ratio must be in [0, 1]");
  {
    std::set<std::string> unique(ids.begin(), ids.end());
    if (unique.size() != ids.size()) throw std::invalid_argument("split: duplicate item ids");
  }
  Rng rng(seed);
  for (std::size_t i = ids.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(ids[i - 1], ids[j]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(ids.size())));
  DatasetSplit split;
  split.seed = seed;
  split.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  return split;
}

DatasetStats dataset_stats(const std::vector<Annotation>& annotations) {
  DatasetStats s;
  s.images = annotations.size();
  for (const auto& a : annotations) {
    std::set<std::string> seen;
    for (const auto& o : a.objects) {
      ++s.objects;
      ++s.objects_per_class[o.name];
      seen.insert(o.name);
      const double rel = static_cast<double>(o.xmax - o.xmin) * (o.ymax - o.ymin) /
                         (static_cast<double>(a.width) * a.height);
      const int bin = std::clamp(static_cast<int>(rel * 10.0), 0, 9);
      ++s.relative_area_histogram[bin];
    }
    for (const auto& n : seen) ++s.images_per_class[n];
  }
  for (const auto& [name, count] : s.objects_per_class) {
    s.class_balance[name] = static_cast<double>(count) / static_cast<double>(s.objects);
  }
  return s;
}

nlohmann::json to_json(const DatasetStats& s) {
  return {{"images", s.images},
          {"objects", s.objects},
          {"objects_per_class", s.objects_per_class},
          {"images_per_class", s.images_per_class},
          {"class_balance", s.class_balance},
          {"relative_area_histogram", s.relative_area_histogram}};
}

}  // namespace maskdet
