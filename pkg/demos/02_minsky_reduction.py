"""
From a two-counter machine to a planning domain
================================================

Simulate a machine, compile it into a one-variable domain, lay out its
halting computation as a timed plan and check it.  Then break the plan in
each of the three ways the rules are meant to catch.
"""

import argparse
from pathlib import Path

from densetp import compile_machine, decode, encode_computation, generate_witness, is_plan, mutate_witness, run
from densetp.formats import parse_machine
from densetp.model import token_times
from densetp.reduction import check_unit_spacing, check_well_formed_code, timeline_word
from densetp.render import render_svg

parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
parser.add_argument("machine", nargs="?", default=str(Path(__file__).parent / "machines" / "m1.txt"))
parser.add_argument("--svg", help="write the witness drawing here")
args = parser.parse_args()

machine = parse_machine(Path(args.machine).read_text())
comp = run(machine, 10_000)
print("halting computation:")
for conf in comp.configurations:
    print("  ", conf)

# one value per transition plus (transition, counter, tag) triples
domain = compile_machine(machine)
(xm,) = domain.variables
print(f"\ncompiled domain: {len(xm.values)} values, {len(domain.rules)} rules")

# the word: one configuration-code per non-final configuration
word = encode_computation(machine, comp)
print(f"code word of {len(word)} symbols decodes to", [str(c) for c in decode(word)])

# every configuration-code spans exactly one time unit
plan = generate_witness(machine, comp)
report = is_plan(domain, plan, "future")
print("\nwitness under the future semantics:", report.summary())
for tok, (s, e) in list(zip(plan["xM"].tokens, token_times(plan["xM"])))[:7]:
    print(f"  [{s}, {e}]  {tok.value}")
print("  ...")

# three ways to break it; the word-level check and the timing check agree
n = len(comp) - 1
cases = [("insert_hash", n, 2), ("delete_hash", 2, machine.transitions[0].counter), ("stretch_config", 1, 1)]
for mutation, cfg, counter in cases:
    try:
        bad = mutate_witness(plan, mutation, cfg, counter)
    except ValueError as exc:
        print(f"{mutation}: not applicable ({exc})")
        continue
    verdict = is_plan(domain, bad, "future").verdict
    word_check = check_well_formed_code(machine, timeline_word(bad)).violation
    timing = check_unit_spacing(bad)
    print(f"{mutation} on configuration {cfg}: plan {'accepted' if verdict else 'rejected'}; "
          f"word check: {word_check.message if word_check else 'ok'}; "
          f"timing: {timing.message if timing else 'ok'}")

if args.svg:
    Path(args.svg).write_text(render_svg(plan))
    print("wrote", args.svg)
