"""Regenerate the FCIDUMP test fixtures and their reference energies.

Requires pyscf. Writes into crates/core/tests/data/.
"""
import json
import os

from pyscf import ao2mo, fci, gto, scf
from pyscf.tools import fcidump

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "tests", "data")


def run(name, atom, basis="sto-3g"):
    mol = gto.M(atom=atom, basis=basis, unit="Angstrom", symmetry=False)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    path = os.path.join(OUT, name + ".fcidump")
    fcidump.from_scf(mf, path, tol=1e-15)
    h1 = mf.mo_coeff.T @ mf.get_hcore() @ mf.mo_coeff
    eri = ao2mo.full(mol, mf.mo_coeff)
    cis = fci.direct_spin1.FCI()
    cis.conv_tol = 1e-14
    e_fci, _ = cis.kernel(h1, eri, mol.nao, mol.nelectron, ecore=mol.energy_nuc())
    ref = {
        "n_orb": int(mol.nao),
        "n_elec": int(mol.nelectron),
        "e_hf": float(mf.e_tot),
        "e_fci": float(e_fci),
        "e_nuc": float(mol.energy_nuc()),
    }
    with open(os.path.join(OUT, name + ".json"), "w") as f:
        json.dump(ref, f, indent=2)
        f.write("\n")
    print(name, ref)


run("h2_sto3g_0.74", "H 0 0 0; H 0 0 0.74")
run("h4_chain_sto3g_1.5", "H 0 0 0; H 0 0 1.5; H 0 0 3.0; H 0 0 4.5")
