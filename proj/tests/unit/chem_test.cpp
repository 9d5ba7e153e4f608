//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mhnpath/chem/fingerprint.hpp"
#include "mhnpath/chem/scaffold.hpp"
#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/errors.hpp"
#include "test_support.hpp"

namespace mhnpath::chem {
namespace {

using mhnpath::testing::data_path;
using mhnpath::testing::permuted;

std::string canon(const std::string &s) { return write_canonical_smiles(parse_smiles(s)); }

TEST(ParseSmiles, Ethanol) {
  const Molecule m = parse_smiles("CCO");
  EXPECT_EQ(m.num_atoms(), 3);
  EXPECT_EQ(m.num_bonds(), 2);
  for (const Bond &b : m.bonds()) EXPECT_EQ(b.order, BondOrder::kSingle);
  EXPECT_EQ(m.atom(0).hydrogens, 3);
  EXPECT_EQ(m.atom(1).hydrogens, 2);
  EXPECT_EQ(m.atom(2).hydrogens, 1);
}

TEST(ParseSmiles, RingClosure) {
  const Molecule m = parse_smiles("C1CC1");
  EXPECT_EQ(m.num_atoms(), 3);
  EXPECT_EQ(m.num_bonds(), 3);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(m.degree(i), 2);
}

TEST(ParseSmiles, UnbalancedBranch) {
  EXPECT_THROW(parse_smiles("C("), SyntaxError);
  EXPECT_THROW(parse_smiles("C)C"), SyntaxError);
  EXPECT_THROW(parse_smiles("C()C"), SyntaxError);
  EXPECT_THROW(parse_smiles("[CH4"), SyntaxError);
}

TEST(ParseSmiles, UnknownSymbolAndExcludedFeatures) {
  EXPECT_THROW(parse_smiles("CXC"), SyntaxError);
  EXPECT_THROW(parse_smiles("F/C=C/F"), SyntaxError);
  EXPECT_THROW(parse_smiles("N[C@@H](C)C(=O)O"), SyntaxError);
  EXPECT_THROW(parse_smiles("[13CH4]"), SyntaxError);
  EXPECT_THROW(parse_smiles("C.C"), SyntaxError);
  EXPECT_THROW(parse_smiles(""), SyntaxError);
}

TEST(ParseSmiles, Errors) {
  EXPECT_THROW(parse_smiles("C1CC"), RingError);
  EXPECT_THROW(parse_smiles("C(C)(C)(C)(C)C"), ValenceError);
  EXPECT_THROW(parse_smiles("[CH4](C)"), ValenceError);
  EXPECT_THROW(parse_smiles("O=O=O"), ValenceError);
}

TEST(ParseSmiles, BracketAtoms) {
  const Molecule m = parse_smiles("[NH4+]");
  EXPECT_EQ(m.atom(0).element, 7);
  EXPECT_EQ(m.atom(0).charge, 1);
  EXPECT_EQ(m.atom(0).hydrogens, 4);
  const Molecule mapped = parse_smiles("[CH3:1][OH:2]");
  EXPECT_EQ(mapped.atom(0).map_id, 1);
  EXPECT_EQ(mapped.atom(1).map_id, 2);
  EXPECT_THROW(parse_smiles("[C:1][O:1]"), SyntaxError);
  const Molecule neg = parse_smiles("[O--]");
  EXPECT_EQ(neg.atom(0).charge, -2);
}

TEST(ParseSmiles, AromaticHydrogens) {
  const Molecule benzene = parse_smiles("c1ccccc1");
  for (const Atom &a : benzene.atoms()) EXPECT_EQ(a.hydrogens, 1);
  for (const Bond &b : benzene.bonds()) EXPECT_EQ(b.order, BondOrder::kAromatic);
  const Molecule pyridine = parse_smiles("c1ccncc1");
  EXPECT_EQ(pyridine.atom(3).hydrogens, 0);
  const Molecule furan = parse_smiles("c1ccoc1");
  EXPECT_EQ(furan.atom(3).hydrogens, 0);
  const Molecule biphenyl = parse_smiles("c1ccc(-c2ccccc2)cc1");
  EXPECT_EQ(biphenyl.bond(*biphenyl.bond_between(3, 4)).order, BondOrder::kSingle);
}

TEST(ParseSmilesSet, Members) {
  const MoleculeSet set = parse_smiles_set("CC.O");
  EXPECT_EQ(set.size(), 2U);
  EXPECT_EQ(set.canonical_key(), parse_smiles_set("O.CC").canonical_key());
  EXPECT_THROW(parse_smiles_set(""), SyntaxError);
  EXPECT_THROW(parse_smiles_set("CC..O"), SyntaxError);
  try {
    parse_smiles_set("CC.C1CC");
    FAIL() << "expected RingError";
  } catch (const RingError &e) {
    EXPECT_NE(std::string(e.what()).find("component 1"), std::string::npos);
  }
}

TEST(CanonicalSmiles, Examples) {
  EXPECT_EQ(canon("OCC"), canon("CCO"));
  EXPECT_EQ(canon("C"), "C");
  // Fixture locked after the first correct run; every aromatic atom is
  // equivalent under the ring automorphisms, so any start gives this text.
  EXPECT_EQ(canon("c1ccccc1"), "c1ccccc1");
  EXPECT_EQ(canon("C1=CC=CC=C1"), "C=1C=CC=CC1");
  EXPECT_EQ(write_canonical_smiles(Molecule()), "");
}

TEST(CanonicalSmiles, BracketsOnlyWhenNeeded) {
  EXPECT_EQ(canon("[CH3][OH]"), canon("CO"));
  EXPECT_EQ(canon("[NH4+]"), "[NH4+]");
  EXPECT_EQ(canon("[CH3:7]O"), "[CH3:7]O");
  EXPECT_EQ(canon("c1cc[nH]c1"), canon("[nH]1cccc1"));
}

class FixtureMolecules : public ::testing::Test {
protected:
  void SetUp() override {
    for (auto &rec : read_molecule_list(data_path("molecules.smi")))
      molecules.push_back(std::move(rec.molecule));
    ASSERT_GE(molecules.size(), 30U);
  }
  std::vector<Molecule> molecules;
};

TEST_F(FixtureMolecules, CanonicalRoundTripIsStable) {
  for (const Molecule &m : molecules) {
    const std::string once = write_canonical_smiles(m);
    const std::string twice = write_canonical_smiles(parse_smiles(once));
    EXPECT_EQ(once, twice) << m.provenance();
    EXPECT_EQ(twice, write_canonical_smiles(parse_smiles(twice)));
  }
}

TEST_F(FixtureMolecules, CanonicalFormInvariantUnderAtomOrder) {
  util::Rng rng(20240601);
  for (const Molecule &m : molecules) {
    const std::string expected = write_canonical_smiles(m);
    const Fingerprint fp = fingerprint(m);
    for (int trial = 0; trial < 1000; ++trial) {
      const Molecule shuffled = permuted(m, rng);
      ASSERT_EQ(write_canonical_smiles(shuffled), expected)
          << m.provenance() << " trial " << trial;
      if (trial % 50 == 0) {
        ASSERT_EQ(fingerprint(shuffled), fp) << m.provenance();
      }
    }
  }
}

TEST(Fingerprint, Examples) {
  EXPECT_EQ(fingerprint(parse_smiles("C"), 0, 4096).popcount(), 1);
  EXPECT_EQ(fingerprint(parse_smiles("OCC")), fingerprint(parse_smiles("CCO")));
  const int bits = fingerprint(parse_smiles("CCO"), 1, 4096).popcount();
  EXPECT_GE(bits, 3);
  EXPECT_LE(bits, 6);
}

TEST(Fingerprint, RejectsBadWidth) {
  EXPECT_THROW(fingerprint(parse_smiles("C"), 2, 1000), ConfigError);
  EXPECT_THROW(fingerprint(parse_smiles("C"), -1, 1024), ConfigError);
}

TEST_F(FixtureMolecules, FingerprintMonotoneInRadius) {
  for (const Molecule &m : molecules) {
    for (int r = 0; r < 4; ++r) {
      EXPECT_TRUE(fingerprint(m, r, 2048).subset_of(fingerprint(m, r + 1, 2048)))
          << m.provenance() << " r=" << r;
    }
  }
}

TEST(Fingerprint, Deterministic) {
  // Frozen on-bit positions guard the hash seed and combiner.
  const auto bits = fingerprint(parse_smiles("C"), 0, 4096).on_bits();
  ASSERT_EQ(bits.size(), 1U);
  const auto again = fingerprint(parse_smiles("[CH4]"), 0, 4096).on_bits();
  EXPECT_EQ(bits, again);
}

TEST(MurckoScaffold, Examples) {
  EXPECT_EQ(write_canonical_smiles(murcko_scaffold(parse_smiles("Cc1ccccc1"))),
            "c1ccccc1");
  EXPECT_EQ(write_canonical_smiles(murcko_scaffold(parse_smiles("c1ccccc1"))),
            "c1ccccc1");
  EXPECT_TRUE(murcko_scaffold(parse_smiles("CCO")).empty());
  EXPECT_EQ(write_canonical_smiles(murcko_scaffold(parse_smiles("CCO"))), "");
  EXPECT_EQ(write_canonical_smiles(murcko_scaffold(parse_smiles("CCc1ccc(CCc2ccccc2)cc1"))),
            canon("c1ccc(CCc2ccccc2)cc1"));
  EXPECT_EQ(write_canonical_smiles(murcko_scaffold(parse_smiles("O=C(O)C1CCCCC1"))),
            "C1CCCCC1");
}

TEST_F(FixtureMolecules, MurckoIsFixedPoint) {
  for (const Molecule &m : molecules) {
    const Molecule once = murcko_scaffold(m);
    const Molecule twice = murcko_scaffold(once);
    EXPECT_EQ(write_canonical_smiles(once), write_canonical_smiles(twice))
        << m.provenance();
  }
}

std::vector<Molecule> parse_all(const std::vector<std::string> &smiles) {
  std::vector<Molecule> out;
  for (const auto &s : smiles) out.push_back(parse_smiles(s));
  return out;
}

TEST(ScaffoldSplit, GroupAtomicity) {
  std::vector<std::string> smiles;
  std::string chain;
  for (int i = 0; i < 10; ++i) {
    chain += "C";
    smiles.push_back(chain + "c1ccccc1");
  }
  const auto parts = scaffold_split(parse_all(smiles), 2, 7);
  ASSERT_EQ(parts.size(), 2U);
  EXPECT_EQ(parts[0].size() + parts[1].size(), 10U);
  EXPECT_TRUE(parts[0].size() == 10U || parts[1].size() == 10U);
}

TEST(ScaffoldSplit, DistinctScaffoldsBalance) {
  const auto parts =
      scaffold_split(parse_all({"c1ccccc1", "C1CCCCC1", "c1ccncc1", "C1CC1"}), 2, 3);
  EXPECT_EQ(parts[0].size(), 2U);
  EXPECT_EQ(parts[1].size(), 2U);
}

TEST(ScaffoldSplit, TenScaffoldsOfTen) {
  const std::vector<std::string> rings = {
      "c1ccccc1", "c1ccncc1", "C1CCCCC1", "C1CCCC1", "c1ccc2ccccc2c1",
      "c1ccsc1",  "c1ccoc1",  "C1CC1",    "C1CCC1",  "c1ccc(-c2ccccc2)cc1"};
  std::vector<std::string> smiles;
  for (const auto &ring : rings) {
    std::string chain;
    for (int j = 0; j < 10; ++j) {
      chain += "C";
      smiles.push_back(chain + ring);
    }
  }
  const auto molecules = parse_all(smiles);
  const auto parts = scaffold_split(molecules, 5, 11);
  std::set<std::size_t> seen;
  std::vector<std::set<std::string>> scaffolds(parts.size());
  for (std::size_t p = 0; p < parts.size(); ++p) {
    EXPECT_EQ(parts[p].size(), 20U);
    for (std::size_t idx : parts[p]) {
      EXPECT_TRUE(seen.insert(idx).second);
      scaffolds[p].insert(write_canonical_smiles(murcko_scaffold(molecules[idx])));
    }
  }
  EXPECT_EQ(seen.size(), molecules.size());
  for (std::size_t p = 0; p < parts.size(); ++p) {
    for (std::size_t q = p + 1; q < parts.size(); ++q) {
      for (const auto &s : scaffolds[p]) EXPECT_EQ(scaffolds[q].count(s), 0U);
    }
  }
}

TEST(ScaffoldSplit, Errors) {
  EXPECT_THROW(scaffold_split({}, 2, 0), EmptyInput);
  EXPECT_THROW(scaffold_split(parse_all({"C"}), 1, 0), ConfigError);
}

TEST(MoleculeList, SkipsCommentsAndReportsLine) {
  const auto path = std::filesystem::temp_directory_path() / "mhnpath_list_test.smi";
  {
    std::ofstream out(path);
    out << "# header\nCCO\n\n  c1ccccc1  # benzene\nC1CC\n";
  }
  EXPECT_THROW(
      {
        try {
          read_molecule_list(path);
        } catch (const SyntaxError &e) {
          EXPECT_NE(std::string(e.what()).find(":5:"), std::string::npos);
          throw;
        }
      },
      SyntaxError);
  {
    std::ofstream out(path);
    out << "# header\nCCO\n\n  c1ccccc1  # benzene\n";
  }
  const auto records = read_molecule_list(path);
  ASSERT_EQ(records.size(), 2U);
  EXPECT_EQ(records[1].smiles, "c1ccccc1");
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace mhnpath::chem
