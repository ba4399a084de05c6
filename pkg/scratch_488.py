"""DFS search: 4.8.8 distance-5 triangular patch, wide ansatz."""
import numpy as np, itertools, sys
sys.path.insert(0, "src")
from synsched import gf2


def oct_verts(X, Y, state):
    full = [(X+1,Y+2),(X-1,Y+2),(X+1,Y-2),(X-1,Y-2),(X+2,Y+1),(X-2,Y+1),(X+2,Y-1),(X-2,Y-1)]
    if state == "full": return full
    if state == "L": return [v for v in full if v[0] < X]
    if state == "R": return [v for v in full if v[0] > X]
    if state == "T": return [v for v in full if v[1] > Y]
    if state == "B": return [v for v in full if v[1] < Y]
    s = X + Y
    if state == "NE": return [v for v in full if v[0]+v[1] > s]
    if state == "SW": return [v for v in full if v[0]+v[1] < s]
    d = X - Y
    if state == "NW": return [v for v in full if v[0]-v[1] < d]
    if state == "SE": return [v for v in full if v[0]-v[1] > d]
    raise ValueError(state)


def sq_verts(X, Y):
    return [(X+1,Y),(X-1,Y),(X,Y+1),(X,Y-1)]


OCT_SLOTS = [(4*i, 4*j) for j in range(3) for i in range(3)]
SQ_SLOTS = [(4*i+2, 4*j+2) for j in range(2) for i in range(2)]
STATES = [None, "full", "L", "R", "T", "B", "NE", "SW", "NW", "SE"]

slot_sets = [[None if s is None else frozenset(oct_verts(*c, s)) for s in STATES]
             for c in OCT_SLOTS]
sq_sets = [frozenset(sq_verts(*c)) for c in SQ_SLOTS]

results = []


def css_distance(H, n, wmax):
    Hi = H.astype(int)
    for w in range(1, wmax + 1):
        for supp in itertools.combinations(range(n), w):
            v = np.zeros(n, dtype=np.uint8)
            v[list(supp)] = 1
            if not ((Hi @ v) % 2).any() and not gf2.in_row_span(v, H):
                return w
    return None


def finish(faces):
    verts = sorted(set().union(*faces), key=lambda p: (p[1], p[0]))
    if len(verts) != 17:
        return
    vid = {v: i for i, v in enumerate(verts)}
    H = np.zeros((len(faces), 17), dtype=np.uint8)
    for fi, f in enumerate(faces):
        for v in f:
            H[fi, vid[v]] = 1
    if 17 - 2 * gf2.rank(H) != 1:
        return
    d = css_distance(H, 17, 5)
    if d == 5:
        results.append((list(faces), verts, H))


def dfs(slot, faces, nfaces_needed):
    if len(results) >= 3:
        return
    if slot == len(OCT_SLOTS):
        if nfaces_needed == 0:
            finish(faces)
        return
    remaining_slots = len(OCT_SLOTS) - slot
    if nfaces_needed > remaining_slots:
        return
    for st_i, fs in enumerate(slot_sets[slot]):
        if fs is None:
            dfs(slot + 1, faces, nfaces_needed)
            continue
        if nfaces_needed == 0:
            continue
        ok = True
        for f in faces:
            if len(f & fs) % 2:
                ok = False
                break
        if not ok:
            continue
        union = set().union(*faces, fs) if faces else set(fs)
        if len(union) > 17:
            continue
        faces.append(fs)
        dfs(slot + 1, faces, nfaces_needed - 1)
        faces.pop()
        if len(results) >= 3:
            return


for nsq in (4, 3, 2):
    for sq_combo in itertools.combinations(range(4), nsq):
        base = [sq_sets[i] for i in sq_combo]
        ok = all(len(a & b) % 2 == 0 for a, b in itertools.combinations(base, 2))
        if not ok:
            continue
        dfs(0, list(base), 8 - nsq)
        if results:
            print(f"found with squares {[SQ_SLOTS[i] for i in sq_combo]}")
            break
    if results:
        break

print("results:", len(results))
for faces, verts, H in results[:2]:
    print("weights:", sorted(len(f) for f in faces))
    for f in faces:
        print("  ", sorted(f))
    print("verts:", verts)
