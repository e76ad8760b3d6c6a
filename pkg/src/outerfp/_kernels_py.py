"""Pure-Python ball kernels; the reference for ``_kernels.pyx``.

Labels and loops are flat int sequences ``d0, e1, d1, ..., en, dn``.  Edge
``i`` has reverse ``i ^ 1``; the decoration after edge ``e`` lives at the
vertex ``initial[e ^ 1]``.
"""


class Context:
    __slots__ = ("initial", "gtab", "goff", "gord", "gid", "elen", "base")

    def __init__(self, initial, gtab, goff, gord, gid, elen, base):
        self.initial = list(initial)
        self.gtab = list(gtab)
        self.goff = list(goff)
        self.gord = list(gord)
        self.gid = list(gid)
        self.elen = list(elen)
        self.base = int(base)


def _act_into(ctx, loop, label, lo, hi):
    initial, gtab, goff, gord, gid = ctx.initial, ctx.gtab, ctx.goff, ctx.gord, ctx.gid
    stack = list(loop)
    v = ctx.base if len(stack) == 1 else initial[stack[-2] ^ 1]
    stack[-1] = gtab[goff[v] + stack[-1] * gord[v] + label[lo]]
    i = lo + 1
    while i < hi:
        e = label[i]
        d = label[i + 1]
        if len(stack) >= 3 and stack[-2] == (e ^ 1) and stack[-1] == gid[v]:
            stack.pop()
            stack.pop()
            v = ctx.base if len(stack) == 1 else initial[stack[-2] ^ 1]
            stack[-1] = gtab[goff[v] + stack[-1] * gord[v] + d]
        else:
            stack.append(e)
            stack.append(d)
            v = initial[e ^ 1]
        i += 2
    stack[-1] = gid[v]
    return stack


def act(ctx, loop, label):
    return tuple(_act_into(ctx, loop, label, 0, len(label)))


def displacements(ctx, loop, flat, offsets):
    """For each label ``flat[offsets[k]:offsets[k+1]]`` return the distance to
    its image under ``loop`` and the depth of that image."""
    elen = ctx.elen
    dists = []
    depths = []
    for k in range(len(offsets) - 1):
        lo, hi = offsets[k], offsets[k + 1]
        img = _act_into(ctx, loop, flat, lo, hi)
        n = len(img)
        j = 0
        while j + 1 < n and lo + j + 1 < hi and img[j] == flat[lo + j] and img[j + 1] == flat[lo + j + 1]:
            j += 2
        dist = 0
        depth = 0
        for t in range(1, n, 2):
            depth += elen[img[t]]
            if t > j:
                dist += elen[img[t]]
        for t in range(lo + j + 1, hi, 2):
            dist += elen[flat[t]]
        dists.append(dist)
        depths.append(depth)
    return dists, depths
