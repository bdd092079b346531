#pragma once

#include <map>
#include <string>
#include <vector>

#include "towerlab/genealogy.hpp"

namespace towerlab {

/// IPAD of a valid group; throws when the maximal-subgroup abelianizations
/// disagree (the input is then not valid).
Ipad ipad(const PcPresentation& g);

/// Bracket grammar [[a,b];[c,...];[d,...]]; round-trips with Ipad::str().
Ipad parse_ipad(const std::string& text);

enum class Q3Side { kNarrow, kWide };

/// Classification of Q_3(G) from the IPAD shape (seven narrow rules, eleven
/// wide rules); returns a catalog key or "unclassified".
std::string classify_q3(const Ipad& i, Q3Side side);

struct SpecialVerdict {
  bool special = false;
  bool two_special = false;
  unsigned fixed_dim = 0;       // sigma-fixed subspace of the multiplicator
  unsigned relation_rank = 0;   // multiplicator dimension
  std::string evidence;
};

/// Special = no valid central extension by Z/2, decided by the fixed-point
/// dimension of sigma on the multiplicator of the 2-cover; 2-special adds
/// relation rank <= 4.
SpecialVerdict is_special(const PcPresentation& g,
                          const GenealogyLimits& lim = {});

struct ViableQuotient {
  Elt z;                       // representative of order 1 or 2
  unsigned kernel_order_log2 = 0;
  bool kernel_elementary = true;
  PcPresentation quotient;     // canonical
};

/// Quotients by the normal sigma-closed subgroup generated by an element of
/// order 1 or 2; one entry per isomorphism class of quotients.
std::vector<ViableQuotient> viable_quotients(const PcPresentation& g,
                                             const Automorphism& sigma,
                                             const GenealogyLimits& lim = {});

struct CatalogEntry {
  std::string key;                    // dotted id, e.g. "64.19"
  std::vector<std::string> aliases;   // e.g. "N.2"
  std::string provenance;
  unsigned order_log2 = 0;
  unsigned two_class = 0;
  Ipad ipad;
  bool valid = false;
  bool special = false;
  bool two_special = false;
  PcPresentation group;
};

/// Embedded catalog of the paper's named groups, keyed by dotted small-group
/// ids and N_k labels.  Metadata is re-verified on load.
class NamedGroupCatalog {
 public:
  void add(CatalogEntry e);
  bool has(const std::string& key) const;
  const CatalogEntry& get(const std::string& key) const;
  const std::vector<CatalogEntry>& entries() const { return entries_; }

  std::string serialize() const;
  static NamedGroupCatalog parse(const std::string& text, bool verify = true);
  static NamedGroupCatalog load(const std::string& path, bool verify = true);

 private:
  std::vector<CatalogEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

struct SelectVerdict {
  bool screen_pass = false;  // fixed_dim <= 1, necessary condition
  bool confirmed = false;    // special overgroup with this viable quotient
  std::string witness;       // catalog key of the overgroup
};

/// Select = viable quotient of a special group; the census supplies the
/// special overgroups (with their sigma witnesses searched on demand).
SelectVerdict is_select(
    const PcPresentation& g,
    const std::vector<std::pair<std::string, const PcPresentation*>>& specials,
    const GenealogyLimits& lim = {});

}  // namespace towerlab
