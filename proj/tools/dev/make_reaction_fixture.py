#!/usr/bin/env python3
#
# mhnpath - retrosynthesis planning with Hopfield template prioritization
# SPDX-License-Identifier: Apache-2.0
#
"""Regenerates tests/data/reactions_100.tsv (frozen; not part of the build).

Forward reaction rules are run with RDKit over small building-block lists;
product atoms inherit the map number of the reactant atom they came from,
and reactant atoms that do not reach the product stay unmapped.
"""

import itertools
import random
import sys

from rdkit import Chem
from rdkit import RDLogger
from rdkit.Chem import AllChem

RDLogger.DisableLog("rdApp.*")

ACIDS = ["CC(=O)O", "OC(=O)c1ccccc1", "OC(=O)CCc1ccccc1", "OC(=O)c1ccncc1", "CC(C)C(=O)O"]
AMINES = ["NCc1ccccc1", "CN", "C1CCNCC1", "Nc1ccccc1", "NCCO", "CC(C)N"]
ALCOHOLS = ["CO", "CCO", "OCc1ccccc1", "CC(C)O"]
ARYL_BROMIDES = ["Brc1ccccc1", "Brc1ccc(C)cc1", "Brc1cccnc1", "COc1ccc(Br)cc1", "Brc1ccc(C#N)cc1"]
BORONIC = ["OB(O)c1ccccc1", "OB(O)c1ccc(F)cc1", "OB(O)c1ccoc1", "CB(O)O"]
ALKYL_HALIDES = ["CI", "BrCc1ccccc1", "CCBr", "BrCC=C"]
PHENOLS = ["Oc1ccccc1", "Oc1ccc(Cl)cc1", "Oc1ccc2ccccc2c1"]
ALDEHYDES = ["O=Cc1ccccc1", "CC=O", "O=CC1CC1"]
SULFONYL = ["CS(=O)(=O)Cl", "Cc1ccc(S(=O)(=O)Cl)cc1"]
NITRO = ["O=[N+]([O-])c1ccccc1", "Cc1ccc([N+](=O)[O-])cc1", "O=[N+]([O-])c1ccc(O)cc1"]
BOC = ["CC(C)(C)OC(=O)NCc1ccccc1", "CC(C)(C)OC(=O)N1CCCC1", "CC(C)(C)OC(=O)NCCO"]
METHYL_ESTERS = ["COC(=O)c1ccccc1", "COC(=O)CCC", "COC(=O)c1ccc(N)cc1"]
KETONES = ["CC(=O)c1ccccc1", "O=C1CCCCC1", "CCC(=O)CC"]

RULES = [
    ("amide", "[C:1](=[O:2])[OH].[N;!H0;!$(NC=O):3]>>[C:1](=[O:2])[N:3]", [ACIDS, AMINES]),
    ("ester", "[C:1](=[O:2])[OH].[OH:3][C:4]>>[C:1](=[O:2])[O:3][C:4]", [ACIDS, ALCOHOLS]),
    ("suzuki", "[c:1]Br.[#6:2]B(O)O>>[c:1][#6:2]", [ARYL_BROMIDES, BORONIC]),
    ("ether", "[c:1][OH:2].[CH3,CH2:3][Br,I]>>[c:1][O:2][C:3]", [PHENOLS, ALKYL_HALIDES]),
    ("n_alkyl", "[N;!H0;!$(NC=O);!$(Nc):1].[CH3,CH2:2][Br,I]>>[N:1][C:2]", [AMINES, ALKYL_HALIDES]),
    ("red_amination", "[CH1:1]=O.[N;!H0;!$(NC=O);!$(Nc):2]>>[C:1][N:2]", [ALDEHYDES, AMINES]),
    ("sulfonamide", "[S:1](=[O:2])(=[O:3])Cl.[N;!H0;!$(NC=O):4]>>[S:1](=[O:2])(=[O:3])[N:4]",
     [SULFONYL, AMINES]),
    ("buchwald", "[c:1]Br.[N;!H0;!$(NC=O);!$(Nc):2]>>[c:1][N:2]", [ARYL_BROMIDES, AMINES]),
    ("nitro_red", "[c:1][N+](=O)[O-]>>[c:1][NH2]", [NITRO]),
    ("boc_off", "[N:1]C(=O)OC(C)(C)C>>[N:1]", [BOC]),
    ("ester_hydrolysis", "[C:1](=[O:2])O[CH3]>>[C:1](=[O:2])[OH]", [METHYL_ESTERS]),
    ("ketone_red", "[C:1](=[O:2])([#6:3])[#6:4]>>[C:1]([O:2])([#6:3])[#6:4]", [KETONES]),
]


def mapped_reaction(rule, reactant_smiles):
    rxn = AllChem.ReactionFromSmarts(rule)
    reactants = [Chem.MolFromSmiles(s) for s in reactant_smiles]
    out = []
    for products in rxn.RunReactants(reactants):
        product = products[0]
        try:
            Chem.SanitizeMol(product)
        except Exception:
            continue
        mapped = [Chem.Mol(r) for r in reactants]
        next_map = 1
        for atom in product.GetAtoms():
            ri = atom.GetIntProp("react_idx") if atom.HasProp("react_idx") else None
            ai = atom.GetIntProp("react_atom_idx") if atom.HasProp("react_atom_idx") else None
            if ri is None or ai is None:
                break
            atom.SetAtomMapNum(next_map)
            mapped[ri].GetAtomWithIdx(ai).SetAtomMapNum(next_map)
            next_map += 1
        else:
            lhs = ".".join(Chem.MolToSmiles(m, isomericSmiles=False) for m in mapped)
            rhs = Chem.MolToSmiles(product, isomericSmiles=False)
            out.append(f"{lhs}>>{rhs}")
    return out


def main(path):
    rng = random.Random(20240611)
    rows, seen = [], set()
    per_rule = {}
    for name, rule, pools in RULES:
        combos = list(itertools.product(*pools))
        rng.shuffle(combos)
        per_rule[name] = []
        for combo in combos:
            for rxn in mapped_reaction(rule, combo):
                key = Chem.MolToSmiles(Chem.MolFromSmiles(rxn.split(">>")[1]))
                if (name, key) in seen:
                    continue
                seen.add((name, key))
                per_rule[name].append(rxn)
                break
    # Round-robin over rules so every chemistry is represented.
    while len(rows) < 100 and any(per_rule.values()):
        for name, _, _ in RULES:
            if per_rule[name] and len(rows) < 100:
                rows.append(per_rule[name].pop(0))
    with open(path, "w") as f:
        f.write("reaction_smiles\tsource\n")
        for i, rxn in enumerate(rows):
            f.write(f"{rxn}\t{'enz' if i % 5 == 0 else 'syn'}\n")
    print(f"wrote {len(rows)} reactions to {path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/reactions_100.tsv")
