#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace dmln {

// Interning table for domains and their constants. Domains are the active
// domain: every constant named in a rule or an evidence file is interned into
// the domain of the argument position it appears at.
class SymbolTable {
 public:
  int domain_id(const std::string& name);
  int find_domain(const std::string& name) const;  // -1 if absent

  int intern(int domain, const std::string& constant);
  std::optional<int> lookup(int domain, const std::string& constant) const;

  const std::string& domain_name(int domain) const { return domain_names_[domain]; }
  const std::string& constant_name(int domain, int id) const {
    return domains_[domain].names[id];
  }
  int domain_count() const { return static_cast<int>(domains_.size()); }
  int domain_size(int domain) const {
    return static_cast<int>(domains_[domain].names.size());
  }

  // Constant ids ordered by name; grounding enumerates domains in this order
  // so that ground-atom ids come out lexicographic.
  std::vector<int> sorted_constants(int domain) const;

 private:
  struct Domain {
    std::vector<std::string> names;
    std::unordered_map<std::string, int> ids;
  };
  std::vector<std::string> domain_names_;
  std::unordered_map<std::string, int> domain_ids_;
  std::vector<Domain> domains_;
};

}  // namespace dmln
