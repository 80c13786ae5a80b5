"""Hand-written machines and inputs shared by the reduction tests."""

from ppeval.cli import bundled
from ppeval.reductions import parse_tm

IMMEDIATE_ACCEPT = """
states s acc
accept acc
blank _
alphabet _ 1
space 2
rule (s,_) -> (acc,_,S)
rule (s,1) -> (acc,1,S)
"""

# halts straight into the reject state, which then steps to itself forever
IMMEDIATE_REJECT = """
states s acc rej
start s
accept acc
reject rej
blank _
alphabet _ 1
space 2
rule (s,_) -> (rej,_,S)
rule (s,1) -> (rej,1,S)
"""

# walks right over the 1s, appends one, walks back to the '>' marker
UNARY_INCREMENT = """
states right back acc
accept acc
blank _
alphabet _ > 1
space 5
rule (right,>) -> (right,>,R)
rule (right,1) -> (right,1,R)
rule (right,_) -> (back,1,L)
rule (back,1) -> (back,1,L)
rule (back,>) -> (acc,>,S)
rule (back,_) -> (back,_,S)
"""

# bounces between the first two cells twice, then accepts iff cell 1 holds a 1
BOUNDED_LOOP = """
states a b c d acc rej
accept acc
reject rej
blank _
alphabet _ 0 1
space 2
rule (a,_) -> (b,_,R)
rule (a,0) -> (b,0,R)
rule (a,1) -> (b,1,R)
rule (b,_) -> (c,_,L)
rule (b,0) -> (c,0,L)
rule (b,1) -> (c,1,L)
rule (c,_) -> (d,_,R)
rule (c,0) -> (d,0,R)
rule (c,1) -> (d,1,R)
rule (d,_) -> (rej,_,S)
rule (d,0) -> (rej,0,S)
rule (d,1) -> (acc,1,L)
"""

FOREVER = """
states s acc
accept acc
blank _
alphabet _ 1
space 1
rule (s,_) -> (s,_,S)
rule (s,1) -> (s,1,S)
"""


def machines():
    """(name, machine, inputs) for the five certification machines."""
    return [
        ("immediate-accept", parse_tm(IMMEDIATE_ACCEPT), ["", "1", "11"]),
        ("immediate-reject", parse_tm(IMMEDIATE_REJECT), ["", "1"]),
        ("parity", parse_tm(bundled("parity.tm").read_text()), ["", "1", "11", "101", "111", "0"]),
        ("unary-increment", parse_tm(UNARY_INCREMENT), [">", ">1", ">11", ">111"]),
        ("bounded-loop", parse_tm(BOUNDED_LOOP), ["01", "00", "1", "11", ""]),
    ]
