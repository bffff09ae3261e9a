#include "core/symbols.hpp"

#include <algorithm>

namespace dmln {

int SymbolTable::domain_id(const std::string& name) {
  auto it = domain_ids_.find(name);
  if (it != domain_ids_.end()) return it->second;
  int id = static_cast<int>(domains_.size());
  domain_ids_.emplace(name, id);
  domain_names_.push_back(name);
  domains_.emplace_back();
  return id;
}

int SymbolTable::find_domain(const std::string& name) const {
  auto it = domain_ids_.find(name);
  return it == domain_ids_.end() ? -1 : it->second;
}

int SymbolTable::intern(int domain, const std::string& constant) {
  Domain& d = domains_[domain];
  auto it = d.ids.find(constant);
  if (it != d.ids.end()) return it->second;
  int id = static_cast<int>(d.names.size());
  d.ids.emplace(constant, id);
  d.names.push_back(constant);
  return id;
}

std::optional<int> SymbolTable::lookup(int domain,
                                       const std::string& constant) const {
  const Domain& d = domains_[domain];
  auto it = d.ids.find(constant);
  if (it == d.ids.end()) return std::nullopt;
  return it->second;
}

std::vector<int> SymbolTable::sorted_constants(int domain) const {
  const Domain& d = domains_[domain];
  std::vector<int> ids(d.names.size());
  for (size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  std::sort(ids.begin(), ids.end(),
            [&](int a, int b) { return d.names[a] < d.names[b]; });
  return ids;
}

}  // namespace dmln
