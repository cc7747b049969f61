"""Parsing, validating, and canonically serializing netlists.

The netlist format is line-oriented: one ``circuit`` header naming the
formulation (loop or node) and the coordinate count, then one ``element``
line per device with its kind, parameters, and signed coordinate
memberships.  ``validate`` returns diagnostics instead of raising, so a
front end can show all problems at once; ``serialize`` produces a
canonical text that round-trips through ``parse``.
"""

from pathlib import Path

from memlag import parse, serialize, validate

HERE = Path(__file__).resolve().parent

text = (HERE / "netlists" / "two_loop.net").read_text()
print("--- input netlist ----------------------------------------")
print(text)

circuit = parse(text)
print("--- parsed ------------------------------------------------")
print(f"name: {circuit.name!r}, formulation: {circuit.formulation}, "
      f"coordinates: {circuit.n_coords}")
for el in circuit.elements:
    print(f"  {el.name}: {el.kind.name.lower()}, membership {el.membership}")

print("\n--- diagnostics -------------------------------------------")
diags = validate(circuit)
if not list(diags):
    print("clean")
for d in diags:
    print(d)
print("(loop 2 has no inductive element, so its coordinate is"
      " first-order: a warning, not an error)")

print("\n--- canonical form ----------------------------------------")
print(serialize(circuit), end="")

assert parse(serialize(circuit)) == circuit
print("\nround trip: parse(serialize(circuit)) == circuit")

print("\n--- a broken netlist --------------------------------------")
broken = """\
circuit oops formulation node coords 1
element M1 MR curve=poly(0,1,0,0.3333333333) mod=q coords +1
element C1 C value=1.0 coords +1
"""
bad = parse(broken)
for d in validate(bad):
    print(d)
print("(charge modulation needs loop analysis; the node dual is"
      " flux modulation)")
