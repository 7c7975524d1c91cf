#!/usr/bin/env python3
#
# Project molopt - Copyright 2026 The molopt Authors.
# SPDX-License-Identifier: Apache-2.0
#
# Builds the descriptor and similarity goldens in tests/data from RDKit.
# Run once; the outputs are committed and the C++ tests never call Python.
#
#   python3 tests/oracles/rdkit_goldens.py <nci_first_5K.smi> > tests/data/descriptor_goldens.tsv

import random
import sys

from rdkit import Chem, RDLogger
from rdkit.Chem import Crippen, Descriptors, QED, rdMolDescriptors, MolSurf

RDLogger.DisableLog("rdApp.*")

ORGANIC = {1, 5, 6, 7, 8, 9, 15, 16, 17, 35, 53}
DONOR = Chem.MolFromSmarts("[#7,#8;!H0]")

DRUGS = [
    "CC(=O)OC1=CC=CC=C1C(=O)O",
    "O=C(Oc1ccccc1C(=O)O)c1ccccc1O",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "CN1C=NC2=C1C(=O)N(C(=O)N2C)C",
    "CC(=O)Nc1ccc(O)cc1",
    "Cc1ccc(cc1)-c1cc(nn1-c1ccc(cc1)S(N)(=O)=O)C(F)(F)F",
    "CN1CCC[C@H]1c1cccnc1",
    "COc1ccc2[nH]cc(CCNC(C)=O)c2c1",
    "O=C(O)c1ccccc1O",
    "c1ccc2c(c1)ccc1ccccc12",
    "C1=CC=C2C=CC=CC=C12",
    "O=C1C=CC=CN1",
    "Clc1ccc(cc1)C(c1ccccc1)N1CCN(CC1)CCOCC(=O)O",
    "CCN(CC)CC(=O)Nc1c(C)cccc1C",
    "CC(C)NCC(O)COc1cccc2ccccc12",
    "OC(=O)CCCc1ccc(N(CCCl)CCCl)cc1",
    "NC(=O)c1cnccn1",
    "Cn1cnc2c1c(=O)n(C)c(=O)n2C",
    "CC1(C)SC2C(NC(=O)Cc3ccccc3)C(=O)N2C1C(=O)O",
    "FC(F)(F)c1ccc(OC(CCNC)c2ccccc2)cc1",
]


def row(smiles):
    mol = Chem.MolFromSmiles(smiles)
    if mol is None:
        return None
    props = QED.properties(mol)
    arom = 0
    for ring in mol.GetRingInfo().AtomRings():
        if all(mol.GetAtomWithIdx(i).GetIsAromatic() for i in ring):
            arom += 1
    rings = mol.GetRingInfo().NumRings()
    hbd = len(mol.GetSubstructMatches(DONOR))
    return [
        smiles,
        "%.4f" % Descriptors.MolWt(mol),
        "%.4f" % MolSurf.TPSA(mol),
        "%.4f" % Crippen.MolLogP(mol),
        str(hbd),
        str(props.HBA),
        str(rings),
        str(arom),
        str(props.ROTB),
        str(props.ALERTS),
        "%.4f" % QED.qed(mol),
        "%.4f" % QED.qed(mol, qedProperties=props._replace(HBD=hbd, AROM=arom)),
        str(mol.GetNumHeavyAtoms()),
    ]


def main():
    random.seed(20260101)
    pool = []
    with open(sys.argv[1]) as f:
        for line in f:
            smi = line.split()[0]
            mol = Chem.MolFromSmiles(smi)
            if mol is None or "." in smi:
                continue
            if any(a.GetAtomicNum() not in ORGANIC for a in mol.GetAtoms()):
                continue
            if any(a.GetAtomicNum() == 1 for a in mol.GetAtoms()):
                continue
            if not 8 <= mol.GetNumHeavyAtoms() <= 40:
                continue
            pool.append(smi)
    picked = DRUGS + random.sample(pool, 280)
    print("#\n# Project molopt - Copyright 2026 The molopt Authors.\n# SPDX-License-Identifier: Apache-2.0\n#")
    print("# Generated by tests/oracles/rdkit_goldens.py with RDKit " + __import__("rdkit").__version__)
    print("# qed_ref is the reference QED; qed_rules recomputes it with this library's HBD and AROM rules.")
    print("\t".join(["smiles", "mw", "tpsa", "clogp", "hbd", "hba", "rings", "aromatic_rings",
                     "rotatable_bonds", "alerts", "qed_ref", "qed_rules", "heavy_atoms"]))
    for smi in picked:
        r = row(smi)
        if r:
            print("\t".join(r))


if __name__ == "__main__":
    main()
