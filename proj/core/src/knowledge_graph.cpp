#include "sentitrade/knowledge_graph.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "sentitrade/io_util.hpp"
#include "sentitrade/text.hpp"

namespace sentitrade {

namespace {

struct RelationName {
  RelationType type;
  std::string_view name;
};

constexpr std::array<RelationName, 7> kRelationNames = {{
    {RelationType::LocationCountry, "LocationCountry"},
    {RelationType::RegionServed, "RegionServed"},
    {RelationType::KeyPerson, "KeyPerson"},
    {RelationType::KeyPeople, "KeyPeople"},
    {RelationType::ParentCompany, "parentCompany"},
    {RelationType::Subsidiary, "subsidiary"},
    {RelationType::Product, "product"},
}};

bool contains_folded(const std::vector<Keyword>& set, const std::string& folded) {
  return std::any_of(set.begin(), set.end(),
                     [&](const Keyword& k) { return k.folded == folded; });
}

void add_keyword(std::vector<Keyword>& set, std::string_view original) {
  Keyword k{std::string{trim(original)}, fold_text(original)};
  if (k.folded.empty() || contains_folded(set, k.folded)) return;
  set.push_back(std::move(k));
}

}  // namespace

RelationCategory category_of(RelationType type) {
  switch (type) {
    case RelationType::LocationCountry:
    case RelationType::RegionServed:
      return RelationCategory::Location;
    case RelationType::KeyPerson:
    case RelationType::KeyPeople:
      return RelationCategory::Person;
    case RelationType::ParentCompany:
      return RelationCategory::ParentCompany;
    case RelationType::Subsidiary:
      return RelationCategory::Subsidiary;
    case RelationType::Product:
      return RelationCategory::Product;
  }
  return RelationCategory::Product;
}

std::string_view to_string(RelationType type) {
  for (const auto& r : kRelationNames) {
    if (r.type == type) return r.name;
  }
  return "?";
}

std::string_view to_string(RelationCategory category) {
  switch (category) {
    case RelationCategory::Location: return "location";
    case RelationCategory::Person: return "person";
    case RelationCategory::ParentCompany: return "parent company";
    case RelationCategory::Subsidiary: return "subsidiary";
    case RelationCategory::Product: return "product";
  }
  return "?";
}

std::string_view to_string(MatchKind kind) {
  switch (kind) {
    case MatchKind::Main: return "main";
    case MatchKind::Related: return "related";
    case MatchKind::None: return "none";
  }
  return "?";
}

std::optional<RelationType> parse_relation_type(std::string_view name) {
  const auto lowered = to_lower_ascii(trim(name));
  for (const auto& r : kRelationNames) {
    if (to_lower_ascii(r.name) == lowered) return r.type;
  }
  return std::nullopt;
}

std::vector<EntityRelation> load_relations_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw InputError(path.string() + ": missing header row");
  const auto header = split_csv_line(lines.front());
  if (header.size() < 3 || to_lower_ascii(trim(header[0])) != "source_entity" ||
      to_lower_ascii(trim(header[1])) != "relation_type" ||
      to_lower_ascii(trim(header[2])) != "target_label") {
    throw InputError(path.string() + ":1: expected header source_entity,relation_type,target_label");
  }
  std::vector<EntityRelation> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto where = path.string() + ":" + std::to_string(i + 1) + ": ";
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 3) throw InputError(where + "expected 3 fields");
    auto type = parse_relation_type(f[1]);
    if (!type) throw InputError(where + "unknown relation type '" + f[1] + "'");
    EntityRelation rel{std::string{trim(f[0])}, *type, std::string{trim(f[2])}};
    if (rel.source_entity.empty() || rel.target_label.empty()) {
      throw InputError(where + "empty entity or label");
    }
    out.push_back(std::move(rel));
  }
  return out;
}

std::vector<EntityRelation> relations_of(std::span<const EntityRelation> all,
                                         std::string_view entity) {
  std::vector<EntityRelation> out;
  for (const auto& r : all) {
    if (r.source_entity == entity) out.push_back(r);
  }
  return out;
}

KeywordDictionary expand_keywords(std::string_view entity, std::span<const EntityRelation> relations,
                                  std::span<const std::string> main_extra) {
  if (fold_text(entity).empty()) throw std::invalid_argument("entity name is empty");
  KeywordDictionary dict;
  dict.entity = std::string{trim(entity)};
  add_keyword(dict.main, entity);
  for (const auto& extra : main_extra) add_keyword(dict.main, extra);
  for (const auto& rel : relations) {
    if (rel.source_entity != dict.entity) {
      throw std::invalid_argument("relation source '" + rel.source_entity + "' is not '" +
                                  dict.entity + "'");
    }
    const auto folded = fold_text(rel.target_label);
    if (contains_folded(dict.main, folded)) continue;
    add_keyword(dict.related, rel.target_label);
  }
  return dict;
}

MatchKind match_folded(std::string_view folded_text, const KeywordDictionary& dict) {
  for (const auto& k : dict.main) {
    if (contains_on_boundary(folded_text, k.folded)) return MatchKind::Main;
  }
  for (const auto& k : dict.related) {
    if (contains_on_boundary(folded_text, k.folded)) return MatchKind::Related;
  }
  return MatchKind::None;
}

MatchKind match_tweet(std::string_view text, const KeywordDictionary& dict) {
  return match_folded(fold_text(text), dict);
}

void write_dictionaries(const std::filesystem::path& path,
                        const std::map<std::string, KeywordDictionary>& by_ticker) {
  std::string out;
  for (const auto& [ticker, dict] : by_ticker) {
    out += "[" + ticker + "] " + dict.entity + "\n";
    for (const auto& k : dict.main) out += "main: " + k.original + "\n";
    for (const auto& k : dict.related) out += "related: " + k.original + "\n";
    out += "\n";
  }
  write_text_file(path, out);
}

std::map<std::string, KeywordDictionary> read_dictionaries(const std::filesystem::path& path) {
  std::map<std::string, KeywordDictionary> out;
  KeywordDictionary* cur = nullptr;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    const auto where = path.string() + ":" + std::to_string(i + 1) + ": ";
    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) throw InputError(where + "unterminated ticker header");
      cur = &out[std::string{line.substr(1, close - 1)}];
      cur->entity = std::string{trim(line.substr(close + 1))};
      continue;
    }
    if (cur == nullptr) throw InputError(where + "keyword before any [TICKER] header");
    if (line.rfind("main:", 0) == 0) {
      add_keyword(cur->main, line.substr(5));
    } else if (line.rfind("related:", 0) == 0) {
      add_keyword(cur->related, line.substr(8));
    } else {
      throw InputError(where + "expected 'main:' or 'related:'");
    }
  }
  return out;
}

}  // namespace sentitrade
