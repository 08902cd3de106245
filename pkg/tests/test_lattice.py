from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaugekit.errors import BadDimension, BadPath, BadSize
from gaugekit.lattice import LatticePath, build_torus, cube_faces, plaquette_boundary


def test_counts():
    lat = build_torus(2, [4, 4])
    assert (lat.nsites, lat.nedges, lat.nplaquettes) == (16, 32, 16)
    lat = build_torus(4, [2, 2, 2, 2])
    assert (lat.nsites, lat.nedges, lat.nplaquettes) == (16, 64, 96)
    assert build_torus(3, [2, 2, 2]).ncubes == 8


def test_bad_shapes():
    with pytest.raises(BadDimension):
        build_torus(5, [2] * 5)
    with pytest.raises(BadSize):
        build_torus(2, [1, 4])
    with pytest.raises(BadSize):
        build_torus(2, [4])


def test_plaquette_boundary_at_origin():
    lat = build_torus(2, [4, 4])
    p = lat.plaquette_index((0, 0), 0, 1)
    assert plaquette_boundary(lat, p) == [((0, 0), 1), ((1, 0), 2), ((0, 1), -1), ((0, 0), -2)]


def _edge_walk(lat, edges):
    """Sites visited when walking the signed stored edges head to tail."""
    out = []
    for base, s in edges:
        mu = abs(s) - 1
        tail, head = (base, lat.step(base, mu)) if s > 0 else (lat.step(base, mu), base)
        out.append((tail, head))
    return out


lattices = st.sampled_from([(2, (3, 4)), (3, (2, 3, 2)), (4, (2, 2, 3, 2))])


@given(lattices, st.integers(0, 10_000))
def test_plaquette_boundary_closes(shape, k):
    lat = build_torus(*shape)
    p = k % lat.nplaquettes
    walk = _edge_walk(lat, plaquette_boundary(lat, p))
    for (_, head), (tail, _) in zip(walk, walk[1:] + walk[:1]):
        assert head == tail
    path = LatticePath.plaquette(lat, p)
    assert path.is_loop(lat)
    assert path.signed_edges(lat) == plaquette_boundary(lat, p)
    rev = path.reversed(lat)
    assert rev.signed_edges(lat) == [(b, -s) for b, s in reversed(path.signed_edges(lat))]


def _cube_boundary_edges(lat, c):
    count = Counter()
    for p, sign in cube_faces(lat, c):
        for base, s in plaquette_boundary(lat, p):
            count[(base, abs(s))] += sign * (1 if s > 0 else -1)
    return count


@pytest.mark.parametrize("dim,n", [(3, 2), (3, 3), (3, 4), (4, 2), (4, 3)])
def test_boundary_of_boundary_vanishes(dim, n):
    lat = build_torus(dim, [n] * dim)
    for c in range(lat.ncubes):
        faces = cube_faces(lat, c)
        assert len(faces) == 6
        assert all(v == 0 for v in _cube_boundary_edges(lat, c).values())
        # every one of the 12 edges is hit twice, with opposite signs
        hits = Counter()
        for p, _ in faces:
            for base, s in plaquette_boundary(lat, p):
                hits[(base, abs(s))] += 1
        assert len(hits) == 12 and set(hits.values()) == {2}


def test_boundary_of_boundary_4d_size_4():
    lat = build_torus(4, [4] * 4)
    for c in range(0, lat.ncubes, 7):
        assert all(v == 0 for v in _cube_boundary_edges(lat, c).values())


def test_opposite_faces_have_opposite_signs():
    lat = build_torus(3, [3, 3, 3])
    faces = cube_faces(lat, 5)
    for k in range(0, 6, 2):
        assert faces[k][1] == -faces[k + 1][1]


@pytest.mark.parametrize("dim,sizes", [(2, (3, 5)), (3, (2, 3, 4)), (4, (2, 3, 2, 2))])
def test_enumerations_are_bijective(dim, sizes):
    lat = build_torus(dim, sizes)
    assert [lat.site_index(lat.site_coords(i)) for i in range(lat.nsites)] == list(range(lat.nsites))
    assert lat.site_coords(1)[0] == 1  # x_1 fastest
    seen = {lat.plaquette(p) for p in range(lat.nplaquettes)}
    assert len(seen) == lat.nplaquettes
    assert all(lat.plaquette_index(*lat.plaquette(p)) == p for p in range(lat.nplaquettes))
    if dim >= 3:
        assert all(lat.cube_index(*lat.cube(c)) == c for c in range(lat.ncubes))
    again = build_torus(dim, sizes)
    assert [again.plaquette(p) for p in range(again.nplaquettes)] == [lat.plaquette(p) for p in range(lat.nplaquettes)]


def test_bad_path():
    lat = build_torus(2, [3, 3])
    with pytest.raises(BadPath):
        LatticePath((0, 0), (3,)).sites(lat)
    with pytest.raises(BadPath):
        LatticePath((0, 0, 0), (1,)).sites(lat)
