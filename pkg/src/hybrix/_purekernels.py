"""Pure-Python kernels.  Reference semantics for the compiled ``_speedups`` module.

Elements of a finite Boolean algebra with ``k`` atoms are ints used as
bitmasks; bit ``y`` set means atom ``y`` lies below the element.  A formula is
compiled to a flat postfix program of ``(opcode, arg)`` pairs.
"""

OP_BOT = 0
OP_VAR = 1      # push vals[arg]
OP_NEG = 2
OP_AND = 3
OP_DIA = 4
OP_SAT = 5      # pop a, pop x: top if x <= a else bottom
OP_SATT = 6     # pop a, pop x: attable[x * size + a]
OP_CONST = 7    # push arg
OP_EXISTS = 8   # pop a: top if a else bottom

BACKEND = "python"


def diamond_table(on_atoms, k):
    """Value of the additive extension of ``on_atoms`` on every element 0 .. 2**k - 1."""
    size = 1 << k
    table = [0] * size
    for b in range(1, size):
        low = b & -b
        table[b] = table[b ^ low] | on_atoms[low.bit_length() - 1]
    return table


def evaluate(prog, vals, dtable, top, attable=None):
    size = top + 1
    stack = []
    push = stack.append
    pop = stack.pop
    for pc in range(0, len(prog), 2):
        op = prog[pc]
        if op == OP_VAR:
            push(vals[prog[pc + 1]])
        elif op == OP_NEG:
            push(top ^ pop())
        elif op == OP_AND:
            b = pop()
            push(pop() & b)
        elif op == OP_DIA:
            push(dtable[pop()])
        elif op == OP_BOT:
            push(0)
        elif op == OP_CONST:
            push(prog[pc + 1])
        elif op == OP_SAT:
            a = pop()
            x = pop()
            push(top if x & ~a == 0 else 0)
        elif op == OP_SATT:
            a = pop()
            x = pop()
            push(attable[x * size + a])
        elif op == OP_EXISTS:
            push(top if pop() else 0)
        else:
            raise ValueError(f"bad opcode {op}")
    return stack[-1]


def find_falsifier(prog_l, prog_r, domains, dtable, top, attable=None):
    """First assignment (odometer order, last variable fastest) on which the two programs differ."""
    n = len(domains)
    if any(len(d) == 0 for d in domains):
        return None
    idx = [0] * n
    vals = [d[0] for d in domains]
    while True:
        if evaluate(prog_l, vals, dtable, top, attable) != evaluate(prog_r, vals, dtable, top, attable):
            return list(vals)
        pos = n - 1
        while pos >= 0:
            idx[pos] += 1
            if idx[pos] < len(domains[pos]):
                vals[pos] = domains[pos][idx[pos]]
                break
            idx[pos] = 0
            vals[pos] = domains[pos][0]
            pos -= 1
        if pos < 0:
            return None
