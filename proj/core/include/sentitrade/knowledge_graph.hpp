#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sentitrade {

/// The closed set of ontology relations used for keyword expansion.
enum class RelationType {
  LocationCountry,
  RegionServed,
  KeyPerson,
  KeyPeople,
  ParentCompany,
  Subsidiary,
  Product,
};

/// The five relation categories the relation names group into.
enum class RelationCategory { Location, Person, ParentCompany, Subsidiary, Product };

RelationCategory category_of(RelationType type);
std::string_view to_string(RelationType type);
std::string_view to_string(RelationCategory category);
/// Case-insensitive; "parentCompany", "ParentCompany", "keyperson" all parse.
std::optional<RelationType> parse_relation_type(std::string_view name);

struct EntityRelation {
  std::string source_entity;
  RelationType relation_type = RelationType::LocationCountry;
  std::string target_label;
};

struct Keyword {
  std::string original;
  std::string folded;
};

/// Main keywords (company name, exchange code, extras) and related keywords
/// from one-hop relations. The two sets are disjoint in folded form.
struct KeywordDictionary {
  std::string entity;
  std::vector<Keyword> main;
  std::vector<Keyword> related;
};

enum class MatchKind { Main, Related, None };
std::string_view to_string(MatchKind kind);

/// `source_entity,relation_type,target_label` snapshot. Throws InputError on
/// unknown relation names or empty labels.
std::vector<EntityRelation> load_relations_csv(const std::filesystem::path& path);

/// Relations whose source is `entity` (exact string match).
std::vector<EntityRelation> relations_of(std::span<const EntityRelation> all,
                                         std::string_view entity);

/// main = {entity} + main_extra; related = relation labels not already main.
/// Throws std::invalid_argument for an empty entity name or a relation whose
/// source is a different entity.
KeywordDictionary expand_keywords(std::string_view entity, std::span<const EntityRelation> relations,
                                  std::span<const std::string> main_extra);

/// Main wins over Related; keywords match on folded token boundaries.
MatchKind match_tweet(std::string_view text, const KeywordDictionary& dict);
/// Same, for text already passed through fold_text.
MatchKind match_folded(std::string_view folded_text, const KeywordDictionary& dict);

/// Plain-text dump, one `[TICKER] entity` block per dictionary followed by
/// `main: ...` / `related: ...` lines. read_dictionaries parses it back.
void write_dictionaries(const std::filesystem::path& path,
                        const std::map<std::string, KeywordDictionary>& by_ticker);
std::map<std::string, KeywordDictionary> read_dictionaries(const std::filesystem::path& path);

}  // namespace sentitrade
