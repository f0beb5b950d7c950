"""Independent brute-force oracles, written without the library's detectors."""
from itertools import combinations


def adjacency(n, edges):
    adj = [[False] * n for _ in range(n)]
    for u, v in edges:
        adj[u][v] = adj[v][u] = True
    return adj


def has_triangle(n, adj):
    return any(adj[a][b] and adj[b][c] and adj[a][c] for a, b, c in combinations(range(n), 3))


def has_c4(n, adj):
    for a, b, c, d in combinations(range(n), 4):
        for w, x, y, z in ((a, b, c, d), (a, b, d, c), (a, c, b, d)):
            if adj[w][x] and adj[x][y] and adj[y][z] and adj[z][w]:
                return True
    return False


def has_k2t(n, adj, t):
    for u, v in combinations(range(n), 2):
        if sum(1 for w in range(n) if adj[u][w] and adj[v][w]) >= t:
            return True
    return False


CHECKS = {
    "triangle": lambda n, adj: has_triangle(n, adj),
    "c4": lambda n, adj: has_c4(n, adj),
    "k{2,2}": lambda n, adj: has_c4(n, adj),
    "k{2,3}": lambda n, adj: has_k2t(n, adj, 3),
}


def brute_max(slots, n, family):
    """Largest edge subset of ``slots`` avoiding every pattern named in ``family``."""
    checks = [CHECKS[name] for name in family]
    subsets = sorted(range(1 << len(slots)), key=lambda m: -bin(m).count("1"))
    for mask in subsets:
        edges = [slots[i] for i in range(len(slots)) if mask >> i & 1]
        adj = adjacency(n, edges)
        if not any(c(n, adj) for c in checks):
            return len(edges)
    return 0


def brute_ex(n, family):
    return brute_max([(u, v) for u, v in combinations(range(n), 2)], n, family)


def brute_z(m, n, family):
    return brute_max([(u, m + v) for u in range(m) for v in range(n)], m + n, family)
