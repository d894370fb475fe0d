#!/usr/bin/env python3
"""Generate the synthetic Boston-shaped fixture.

Writes fixtures/boston_synth/ (zones, tracts, census, permits, registry,
replay cassettes, exact crosswalk, expected counts) and fixtures/jobs_small/.
Every expected count is known by construction; the script checks point
placement and computes exact tract/zone overlap areas with its own polygon
clipping, so nothing here depends on the Rust code.

Usage: python3 generate_boston_synth.py   (run from any directory)
"""

import hashlib
import json
import math
import os
import random
import shutil

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "boston_synth")
SMALL = os.path.join(HERE, "jobs_small")

SEED = 20240917
LON0, LON1 = -71.19, -70.99
LAT0, LAT1 = 42.23, 42.40
NX, NY = 7, 5  # zone lattice cells
TX, TY = 10, 6  # tract grid
DOWNTOWN = (-71.06, 42.355)

KEYWORDS = [
    "innovation hubs",
    "clustering",
    "innovation center",
    "startups",
    "innovation districts",
    "open innovation",
    "tech hub",
    "technology park",
    "incubator",
    "accelerators",
    "regional innovation",
    "co-working space",
]
EMPTY_KEYWORD = "regional innovation"
TAGS = ["company=startup", "office=coworking", "office=research"]
JOB_QUERY = "technology"

# 34 lattice zips (one spans two cells) plus the enclave 02199
ZIPS = [
    "02108", "02109", "02110", "02111", "02113", "02114", "02115", "02116",
    "02118", "02119", "02120", "02121", "02122", "02124", "02125", "02126",
    "02127", "02128", "02129", "02130", "02131", "02132", "02134", "02135",
    "02136", "02163", "02201", "02203", "02204", "02205", "02210", "02215",
    "02222", "02467",
]
HOLEY = "02116"
ENCLAVE = "02199"
MULTI = "02128"
NO_POI = ["02136", "02467"]
CAMBRIDGE = ["02139", "02142"]
HOLE_UV = (0.4, 0.6)


def r6(x):
    return round(x, 6)


def fmt6(x):
    return f"{x:.6f}"


# ---------------------------------------------------------------- geometry


def shoelace(ring):
    """Signed area of an open ring."""
    a = 0.0
    for i in range(len(ring)):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % len(ring)]
        a += x0 * y1 - x1 * y0
    return a / 2.0


def clip_rect(poly, x0, y0, x1, y1):
    """Sutherland-Hodgman clip of an open ring against a rectangle."""

    def clip(pts, inside, cross):
        out = []
        for i in range(len(pts)):
            cur, prev = pts[i], pts[i - 1]
            if inside(cur):
                if not inside(prev):
                    out.append(cross(prev, cur))
                out.append(cur)
            elif inside(prev):
                out.append(cross(prev, cur))
        return out

    def at_x(x):
        return lambda p, q: (x, p[1] + (q[1] - p[1]) * (x - p[0]) / (q[0] - p[0]))

    def at_y(y):
        return lambda p, q: (p[0] + (q[0] - p[0]) * (y - p[1]) / (q[1] - p[1]), y)

    pts = list(poly)
    for inside, cross in [
        (lambda p: p[0] >= x0, at_x(x0)),
        (lambda p: p[0] <= x1, at_x(x1)),
        (lambda p: p[1] >= y0, at_y(y0)),
        (lambda p: p[1] <= y1, at_y(y1)),
    ]:
        if not pts:
            break
        pts = clip(pts, inside, cross)
    return pts


def in_convex(ring, p, margin=0.0):
    """True if p lies inside the CCW convex ring by more than margin."""
    for i in range(len(ring)):
        ax, ay = ring[i]
        bx, by = ring[(i + 1) % len(ring)]
        cross = (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax)
        edge = math.hypot(bx - ax, by - ay)
        if cross / edge <= margin:
            return False
    return True


# ---------------------------------------------------------------- zones


def lattice(rng):
    sx = (LON1 - LON0) / NX
    sy = (LAT1 - LAT0) / NY
    v = {}
    for i in range(NX + 1):
        for j in range(NY + 1):
            x = LON0 + i * sx
            y = LAT0 + j * sy
            if 0 < i < NX and 0 < j < NY:
                x += rng.uniform(-0.18, 0.18) * sx
                y += rng.uniform(-0.18, 0.18) * sy
            v[i, j] = (r6(x), r6(y))
    return v


def quad(v, i, j):
    return [v[i, j], v[i + 1, j], v[i + 1, j + 1], v[i, j + 1]]


def bilinear(q, u, w):
    a, b, c, d = q
    x = (1 - u) * (1 - w) * a[0] + u * (1 - w) * b[0] + u * w * c[0] + (1 - u) * w * d[0]
    y = (1 - u) * (1 - w) * a[1] + u * (1 - w) * b[1] + u * w * c[1] + (1 - u) * w * d[1]
    return (x, y)


class Zone:
    def __init__(self, zip_id, quads, hole=None):
        self.zip_id = zip_id
        self.quads = quads  # open CCW rings
        self.hole = hole  # open CCW ring subtracted from quads[0]

    def area_in(self, x0, y0, x1, y1):
        a = sum(abs(shoelace(clip_rect(q, x0, y0, x1, y1) or [(0, 0)])) for q in self.quads)
        if self.hole:
            a -= abs(shoelace(clip_rect(self.hole, x0, y0, x1, y1) or [(0, 0)]))
        return a

    def contains(self, p, margin=1e-5):
        if self.hole and not _outside_convex(self.hole, p, margin):
            return False
        return any(in_convex(q, p, margin) for q in self.quads)

    def center(self):
        q = self.quads[0]
        return bilinear(q, 0.5, 0.5)

    def geometry(self):
        def closed(ring):
            return [list(p) for p in ring] + [list(ring[0])]

        if self.hole:
            rings = [closed(self.quads[0]), closed(list(reversed(self.hole)))]
            return {"type": "Polygon", "coordinates": rings}
        if len(self.quads) == 1:
            return {"type": "Polygon", "coordinates": [closed(self.quads[0])]}
        return {"type": "MultiPolygon", "coordinates": [[closed(q)] for q in self.quads]}


def _outside_convex(ring, p, margin):
    for i in range(len(ring)):
        ax, ay = ring[i]
        bx, by = ring[(i + 1) % len(ring)]
        cross = (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax)
        if cross / math.hypot(bx - ax, by - ay) < -margin:
            return True
    return False


def build_zones(rng):
    v = lattice(rng)
    cells = [(i, j) for j in range(NY) for i in range(NX)]
    for i, j in cells:
        q = quad(v, i, j)
        assert shoelace(q) > 0
        for k in range(4):
            a, b, c = q[k], q[(k + 1) % 4], q[(k + 2) % 4]
            assert (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) > 0, "non-convex cell"
    # two non-adjacent cells form the multipolygon zip
    multi_cells = [(6, 4), (4, 4)]
    holey_cell = (3, 3)
    rest = [c for c in cells if c not in multi_cells]
    zips = [z for z in ZIPS if z != MULTI]
    assert len(rest) == len(zips) == 33
    zones = {}
    quads = {}
    for cell, zip_id in zip(rest, zips):
        q = quad(v, *cell)
        quads[zip_id] = q
        if zip_id == HOLEY:
            continue
        zones[zip_id] = Zone(zip_id, [q])
    assert HOLEY in quads
    # the holey zip sits on the chosen cell; swap if the ordering put it elsewhere
    hq = quad(v, *holey_cell)
    holder = next(z for z, q in quads.items() if q == hq)
    if holder != HOLEY:
        zones[holder] = Zone(holder, [quads[HOLEY]])
        quads[holder], quads[HOLEY] = quads[HOLEY], hq
    lo, hi = HOLE_UV
    hole = [tuple(map(r6, bilinear(hq, u, w))) for u, w in [(lo, lo), (hi, lo), (hi, hi), (lo, hi)]]
    zones[HOLEY] = Zone(HOLEY, [hq], hole=hole)
    zones[ENCLAVE] = Zone(ENCLAVE, [hole])
    zones[MULTI] = Zone(MULTI, [quad(v, *c) for c in multi_cells])
    assert len(zones) == 35
    return dict(sorted(zones.items()))


def random_point(rng, zone):
    """Uniform-ish point well inside a zone, away from holes and edges."""
    if zone.zip_id == ENCLAVE:
        hq = None
        # the enclave is the bilinear image of the hole square of its parent
        for _ in range(1000):
            u, w = rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)
            p = bilinear(zone.quads[0], u, w)
            p = (r6(p[0]), r6(p[1]))
            if zone.contains(p):
                return p
        raise RuntimeError("no enclave point")
    for _ in range(1000):
        q = rng.choice(zone.quads)
        u, w = rng.uniform(0.08, 0.92), rng.uniform(0.08, 0.92)
        if zone.hole and 0.34 < u < 0.66 and 0.34 < w < 0.66:
            continue
        p = bilinear(q, u, w)
        p = (r6(p[0]), r6(p[1]))
        if zone.contains(p):
            return p
    raise RuntimeError(f"no point in {zone.zip_id}")


def outside_point(rng):
    side = rng.randrange(3)
    if side == 0:
        return (r6(rng.uniform(LON0, LON1)), r6(rng.uniform(LAT1 + 0.004, LAT1 + 0.02)))
    if side == 1:
        return (r6(rng.uniform(LON1 + 0.004, LON1 + 0.02)), r6(rng.uniform(LAT0, LAT1)))
    return (r6(rng.uniform(LON0, LON1)), r6(rng.uniform(LAT0 - 0.02, LAT0 - 0.004)))


def assert_outside(zones, p):
    assert not (LON0 <= p[0] <= LON1 and LAT0 <= p[1] <= LAT1), p


def owner(zones, p):
    hits = [z for z, zone in zones.items() if zone.contains(p)]
    assert len(hits) == 1, (p, hits)
    return hits[0]


def closeness(p):
    d = math.hypot((p[0] - DOWNTOWN[0]) * math.cos(math.radians(42.3)), p[1] - DOWNTOWN[1])
    return math.exp(-d / 0.04)


def weighted_zip(rng, zones, allowed=None):
    keys = [z for z in zones if allowed is None or z in allowed]
    w = [0.15 + closeness(zones[z].center()) for z in keys]
    return rng.choices(keys, weights=w)[0]


# ---------------------------------------------------------------- output helpers


def request_key(source, params):
    canon = source + "\n" + "".join(f"{k}={params[k]}\n" for k in sorted(params))
    return hashlib.sha256(canon.encode()).hexdigest()


def write_cassette(root, source, params, body):
    d = os.path.join(root, source)
    os.makedirs(d, exist_ok=True)
    with open(os.path.join(d, request_key(source, params) + ".json"), "w") as f:
        json.dump(body, f, indent=1, sort_keys=True)
        f.write("\n")


def write_json(path, obj):
    with open(path, "w") as f:
        json.dump(obj, f, indent=1, sort_keys=True)
        f.write("\n")


def paged(root, source, params, items, size):
    pages = [items[i : i + size] for i in range(0, len(items), size)] or [[]]
    tag = request_key(source, params)[:12]
    token = None
    for n, page in enumerate(pages):
        p = dict(params)
        if token:
            p["pagetoken"] = token
        body = {"results": page}
        if source == "keyword_search":
            body["status"] = "OK" if page else "ZERO_RESULTS"
        if n + 1 < len(pages):
            token = f"{tag}-p{n + 2}"
            body["next_page_token"] = token
        write_cassette(root, source, p, body)


# ---------------------------------------------------------------- datasets


def keyword_places(rng, zones):
    """Distinct places F001.. with their sightings per keyword."""
    inside = [z for z in zones if z not in NO_POI]
    assignment = []
    for z in inside:
        assignment += [z, z]  # every populated zone gets at least two places
    while len(assignment) < 294:
        assignment.append(weighted_zip(rng, zones, inside))
    rng.shuffle(assignment)
    per_zone = {z: assignment.count(z) for z in inside}

    places = []
    seen_zone = set()
    for k, z in enumerate(assignment + [None] * 6):
        pid = f"F{k + 1:03d}"
        loc = random_point(rng, zones[z]) if z else outside_point(rng)
        if z is None:
            assert_outside(zones, loc)
        else:
            assert owner(zones, loc) == z
        if z is not None and z not in seen_zone:
            count = rng.randint(15, 60)
            seen_zone.add(z)
        elif rng.random() < 0.12:
            count = 0
        else:
            n = per_zone.get(z, 1)
            count = max(1, round(22 * n**0.3 * rng.uniform(0.6, 1.4)))
        rating = round(rng.uniform(3.0, 5.0), 1) if count else None
        places.append({"id": pid, "zip": z, "loc": loc, "rating": rating, "count": count})

    # a malformed rating the normalizer drops, and a rating without a count
    places[49]["rating"], places[49]["count"] = 6.2, 12
    places[60]["rating"], places[60]["count"] = 4.4, 0

    others = [t for t in KEYWORDS if t not in ("incubator", EMPTY_KEYWORD)]
    for k, p in enumerate(places):
        terms = ["incubator"] if k < 7 else [rng.choice(others)]
        if rng.random() < 0.2:
            extra = rng.choice([t for t in others if t not in terms])
            terms.append(extra)
        p["terms"] = terms
    return places


def place_result(p, loc=None, count=None):
    lon, lat = loc or p["loc"]
    r = {
        "place_id": p["id"],
        "name": f"Innovation place {p['id']}",
        "geometry": {"location": {"lat": lat, "lng": lon}},
    }
    c = p["count"] if count is None else count
    if p["rating"] is not None:
        r["rating"] = p["rating"]
    if c:
        r["user_ratings_total"] = c
    return r


def write_keyword_cassettes(rng, root, region, places):
    # F100 is sighted twice ~150 m apart; the second sighting has more
    # ratings, so dedupe keeps it
    conflict = places[99]
    conflict["terms"] = conflict["terms"][:1] + [
        next(t for t in KEYWORDS if t not in conflict["terms"] and t not in ("incubator", EMPTY_KEYWORD))
    ]
    lon, lat = conflict["loc"]
    moved = (lon, r6(lat + 0.00135))
    assert owner(ZONES, moved) == conflict["zip"]
    conflict["count"] = max(conflict["count"], 5)
    if conflict["rating"] is None:
        conflict["rating"] = 4.0

    raw = 0
    for term in KEYWORDS:
        hits = [p for p in places if term in p["terms"]]
        results = []
        for p in hits:
            if p is conflict and term == conflict["terms"][0]:
                results.append(place_result(p, count=p["count"] - 3))
            elif p is conflict:
                results.append(place_result(p, loc=moved))
            else:
                results.append(place_result(p))
        rng.shuffle(results)
        raw += len(results)
        paged(root, "keyword_search", {"query": term, "region": region}, results, 20)
    kept = dict(conflict)
    kept["loc"] = moved
    return raw, conflict, moved


def write_tag_cassettes(rng, root, region, zones):
    sizes = {"company=startup": 24, "office=coworking": 3, "office=research": 12}
    elements = {}
    next_id = 1000
    locations = {}
    for tag, n in sizes.items():
        els = []
        for k in range(n):
            next_id += 7
            kind = "node" if k % 4 else "way"
            out = tag == "company=startup" and k in (5, 17)
            loc = outside_point(rng) if out else random_point(rng, zones[weighted_zip(rng, zones)])
            key, value = tag.split("=")
            el = {"type": kind, "id": next_id, "tags": {key: value, "name": f"{value} {next_id}"}}
            if kind == "node":
                el["lat"], el["lon"] = loc[1], loc[0]
            else:
                el["center"] = {"lat": loc[1], "lon": loc[0]}
            els.append(el)
            locations[f"{kind}/{next_id}"] = loc
        elements[tag] = els
    # one research office also carries the startup tag
    shared = dict(elements["office=research"][2])
    elements["company=startup"].append(shared)
    # a relation without coordinates is skipped by the client
    elements["office=research"].append({"type": "relation", "id": 99, "tags": {"office": "research"}})
    raw = 0
    for tag in TAGS:
        els = elements[tag]
        raw += sum(1 for e in els if e["type"] != "relation")
        write_cassette(root, "tag_query", {"region": region, "tag": tag}, {"elements": els, "version": 0.6})
    records = len(locations)
    unassigned = sum(1 for p in locations.values() if not (LON0 <= p[0] <= LON1 and LAT0 <= p[1] <= LAT1))
    covered = {owner(zones, p) for p in locations.values() if LON0 <= p[0] <= LON1 and LAT0 <= p[1] <= LAT1}
    return raw, records, unassigned, covered


def write_jobs(rng, root, region, zones):
    job_zips = sorted(rng.sample([z for z in zones if z not in NO_POI], 20))
    rows = []
    used = set()
    assigned = unassigned = without = 0
    for k in range(100):
        key = f"J{k + 1:04d}"
        kind = rng.random()
        r = {"jobkey": key, "jobtitle": rng.choice(["Software Engineer", "Data Scientist", "Product Manager", "Lab Technician", "Designer"])}
        if kind < 0.14:
            r["formattedLocation"] = rng.choice(["Boston, MA", "Remote", "Greater Boston Area"])
            without += 1
        elif kind < 0.22:
            r["formattedLocation"] = f"Cambridge, MA {rng.choice(CAMBRIDGE)}"
            unassigned += 1
        else:
            z = rng.choice(job_zips)
            suffix = f"-{rng.randint(1000, 9999)}" if rng.random() < 0.1 else ""
            r["formattedLocation"] = f"Boston, MA {z}{suffix}"
            if rng.random() < 0.5:
                lon, lat = random_point(rng, zones[z])
                r["latitude"], r["longitude"] = lat, lon
            assigned += 1
            used.add(z)
        rows.append(r)
    rows.insert(40, dict(rows[10]))  # the same posting listed twice
    paged(root, "jobs", {"query": JOB_QUERY, "region": region}, rows, 25)
    return {"raw": len(rows), "records": 100, "assigned": assigned, "unassigned": unassigned, "without_zip": without, "zips": sorted(used)}


def write_registry(rng, path, zones):
    lines = []
    unassigned = 0
    for k in range(12):
        if k == 7:
            loc = outside_point(rng)
            unassigned += 1
        else:
            loc = random_point(rng, zones[weighted_zip(rng, zones)])
        lines.append({"place_id": f"cb-{k + 1:03d}", "name": f"Registry startup {k + 1}", "location": {"lon": loc[0], "lat": loc[1]}, "matched_terms": ["startup"]})
    lines.append(dict(lines[3]))
    with open(path, "w") as f:
        for line in lines:
            f.write(json.dumps(line, sort_keys=True) + "\n")
    return {"raw": 13, "records": 12, "assigned": 12 - unassigned, "unassigned": unassigned}


def tracts():
    sx = (LON1 - LON0) / TX
    sy = (LAT1 - LAT0) / TY
    out = []
    for j in range(TY):
        for i in range(TX):
            x0, y0 = r6(LON0 + i * sx), r6(LAT0 + j * sy)
            x1, y1 = r6(LON0 + (i + 1) * sx), r6(LAT0 + (j + 1) * sy)
            geoid = f"25025{(j * TX + i + 1) * 100:06d}"
            out.append((geoid, (x0, y0, x1, y1)))
    return out


def write_census(rng, path, tract_list):
    header = "GEOID,pop_total,pop_white,pop_black,pop_hispanic,vacant_units,housing_units,median_income,median_home_value\n"
    total = 0
    with open(path, "w") as f:
        f.write(header)
        for k, (geoid, (x0, y0, x1, y1)) in enumerate(tract_list):
            c = closeness(((x0 + x1) / 2, (y0 + y1) / 2))
            pop = rng.randint(1500, 6000)
            white = round(pop * min(0.92, max(0.05, 0.3 + 0.55 * c + rng.uniform(-0.12, 0.12))))
            black = round((pop - white) * rng.uniform(0.3, 0.65))
            hisp = round((pop - white - black) * rng.uniform(0.3, 0.8))
            housing = round(pop / rng.uniform(2.0, 2.6))
            vacant = round(housing * min(0.3, max(0.01, 0.12 - 0.08 * c + rng.uniform(-0.03, 0.03))))
            income = str(round(38000 + 90000 * c + rng.uniform(-8000, 8000), -2))
            home = str(round(320000 + 600000 * c + rng.uniform(-40000, 40000), -3))
            if k == 11:
                income = ""
            if k == 37:
                income = "-666666666"
            if k == 52:
                home = ""
            total += pop
            f.write(f"{geoid},{pop},{white},{black},{hisp},{vacant},{housing},{income.removesuffix('.0')},{home.removesuffix('.0')}\n")
    return total


def write_permits(rng, path, zones):
    labels = [
        ("Commercial", "commercial"), ("COMM", "commercial"), ("commercial", "commercial"),
        ("Mixed Use", "mixed"), ("mixed-use", "mixed"),
        ("Residential", "residential"), ("1-2FAM", "residential"), ("Multi", "residential"),
        ("Institutional", "other"), ("", "other"),
    ]
    weights = [90, 50, 40, 50, 40, 90, 60, 50, 30, 20]
    stats = {"records": 0, "commercial": 0, "assigned": 0, "unassigned": 0, "null_values": 0}
    with open(path, "w") as f:
        f.write("permit_id,lon,lat,occupancy,declared_value,issued_date\n")
        for k in range(520):
            label, cls = rng.choices(labels, weights=weights)[0]
            outside = rng.random() < 0.03
            loc = outside_point(rng) if outside else random_point(rng, zones[weighted_zip(rng, zones)])
            value = "" if rng.random() < 0.05 else str(rng.randint(5, 900) * 1000)
            date = f"{rng.randint(2019, 2023)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
            f.write(f"P{k + 1:05d},{loc[0]},{loc[1]},{label},{value},{date}\n")
            stats["records"] += 1
            if cls in ("commercial", "mixed"):
                stats["commercial"] += 1
                stats["unassigned" if outside else "assigned"] += 1
                stats["null_values"] += value == ""
    return stats


def write_small_jobs(root):
    region = "-71.200000,42.200000,-70.900000,42.450000"
    rows = [
        {"jobkey": "S01", "jobtitle": "Backend Engineer", "formattedLocation": "Boston, MA 02110"},
        {"jobkey": "S02", "jobtitle": "Data Engineer", "formattedLocation": "Boston, MA 02210-1204"},
        {"jobkey": "S03", "jobtitle": "Research Scientist", "formattedLocation": "Boston, MA"},
        {"jobkey": "S04", "jobtitle": "Founder Associate", "formattedLocation": "Boston, MA 02116", "latitude": 42.3503, "longitude": -71.0810},
        {"jobkey": "S05", "jobtitle": "Analyst", "formattedLocation": "Remote"},
        {"jobkey": "S06", "jobtitle": "Designer", "formattedLocation": "Cambridge, MA 02139"},
        {"jobkey": "S07", "jobtitle": "Lab Manager"},
        {"jobkey": "S08", "jobtitle": "ML Engineer", "formattedLocation": "Boston, MA 02115"},
        {"jobkey": "S09", "jobtitle": "Recruiter", "formattedLocation": "Greater Boston"},
        {"jobkey": "S10", "jobtitle": "Product Lead", "formattedLocation": "Boston, MA 02199"},
    ]
    paged(root, "jobs", {"query": JOB_QUERY, "region": region}, rows, 6)
    return region


# ---------------------------------------------------------------- main


def main():
    global ZONES
    rng = random.Random(SEED)
    for d in (OUT, SMALL):
        if os.path.isdir(d):
            shutil.rmtree(d)
        os.makedirs(d)
    cassettes = os.path.join(OUT, "cassettes")

    zones = build_zones(rng)
    ZONES = zones
    write_json(
        os.path.join(OUT, "zones.geojson"),
        {
            "type": "FeatureCollection",
            "features": [
                {"type": "Feature", "properties": {"ZIP5": z, "name": f"Zone {z}"}, "geometry": zone.geometry()}
                for z, zone in zones.items()
            ],
        },
    )
    xs = [p[0] for zone in zones.values() for q in zone.quads for p in q]
    ys = [p[1] for zone in zones.values() for q in zone.quads for p in q]
    region = ",".join(fmt6(v) for v in (min(xs), min(ys), max(xs), max(ys)))
    assert region == "-71.190000,42.230000,-70.990000,42.400000", region

    tract_list = tracts()
    write_json(
        os.path.join(OUT, "tracts.geojson"),
        {
            "type": "FeatureCollection",
            "features": [
                {
                    "type": "Feature",
                    "properties": {"GEOID": g},
                    "geometry": {"type": "Polygon", "coordinates": [[[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]]},
                }
                for g, (x0, y0, x1, y1) in tract_list
            ],
        },
    )

    # exact overlap weights, the oracle for the sampled crosswalk
    exact = []
    best = {z: 0.0 for z in zones}
    for g, (x0, y0, x1, y1) in tract_list:
        area = (x1 - x0) * (y1 - y0)
        row = {z: zone.area_in(x0, y0, x1, y1) / area for z, zone in zones.items()}
        s = sum(row.values())
        assert abs(s - 1.0) < 1e-9, (g, s)
        for z, w in row.items():
            if w > 1e-12:
                exact.append((g, z, w))
                best[z] = max(best[z], w)
    assert min(best.values()) > 0.01, best
    with open(os.path.join(OUT, "crosswalk_exact.csv"), "w") as f:
        f.write("tract_id,zip_id,weight\n")
        for g, z, w in exact:
            f.write(f"{g},{z},{w:.12f}\n")

    pop_total = write_census(rng, os.path.join(OUT, "census.csv"), tract_list)

    places = keyword_places(rng, zones)
    kw_raw, conflict, moved = write_keyword_cassettes(rng, cassettes, region, places)
    kw_out = sum(1 for p in places if p["zip"] is None)
    tag_raw, tag_records, tag_out, tag_zips = write_tag_cassettes(rng, cassettes, region, zones)
    jobs = write_jobs(rng, cassettes, region, zones)
    registry = write_registry(rng, os.path.join(OUT, "registry.jsonl"), zones)
    permits = write_permits(rng, os.path.join(OUT, "permits.csv"), zones)
    small_region = write_small_jobs(os.path.join(SMALL, "cassettes"))

    # ratings outside [1, 5] are dropped together with their count
    rating_sum = {}
    for p in places:
        valid = p["rating"] is None or 1.0 <= p["rating"] <= 5.0
        if p["zip"] is not None and valid:
            rating_sum[p["zip"]] = rating_sum.get(p["zip"], 0) + p["count"]
    loglog_pairs = sum(1 for v in rating_sum.values() if v > 0)

    incubator = sorted(p["id"] for p in places if "incubator" in p["terms"])
    coworking = 3
    expected = {
        "fetch": {
            "keyword_search.raw": kw_raw,
            "keyword_search.records": len(places),
            "keyword_search.location_conflicts": 1,
            "tag_query.raw": tag_raw,
            "tag_query.records": tag_records,
            "tag_query.location_conflicts": 0,
            "registry.raw": registry["raw"],
            "registry.records": registry["records"],
            "registry.location_conflicts": 0,
            "jobs.raw": jobs["raw"],
            "jobs.records": jobs["records"],
            "jobs.without_zip": jobs["without_zip"],
        },
        "aggregate": {
            "zones": 35,
            "tract_geometries": 60,
            "census.tracts": 60,
            "census.pop_total": pop_total,
            "crosswalk.unassigned_tracts": 0,
            "crosswalk.partially_outside_tracts": 0,
            "socio.zips": 35,
            "keyword_search.assigned": len(places) - kw_out,
            "keyword_search.unassigned": kw_out,
            "tag_query.assigned": tag_records - tag_out,
            "tag_query.unassigned": tag_out,
            "registry.assigned": registry["assigned"],
            "registry.unassigned": registry["unassigned"],
            "permits.records": permits["records"],
            "permits.commercial": permits["commercial"],
            "permits.assigned": permits["assigned"],
            "permits.unassigned": permits["unassigned"],
            "permits.null_values": permits["null_values"],
            "jobs.assigned": jobs["assigned"],
            "jobs.unassigned": jobs["unassigned"],
            "jobs.without_zip": jobs["without_zip"],
            "features.rows": 35,
        },
        "correlate": {"columns": 15, "loglog.pairs": loglog_pairs},
        "render": {
            "maps": 4,
            "location_count.null_zones": 0,
            "permit_count.null_zones": 0,
            "vacancy_rate.null_zones": 0,
            "pct_white.null_zones": 0,
        },
    }
    facts = {
        "region": region,
        "incubator_ids": incubator,
        "coworking_records": coworking,
        "zips_without_pois": NO_POI,
        "zips_without_jobs": sorted(set(zones) - set(jobs["zips"])),
        "zips_without_tag_pois": sorted(set(zones) - tag_zips),
        "multipolygon_zip": MULTI,
        "holey_zip": HOLEY,
        "enclave_zip": ENCLAVE,
        "conflict_place": {"place_id": conflict["id"], "kept_lon": moved[0], "kept_lat": moved[1]},
        "small_jobs": {"region": small_region, "query": JOB_QUERY, "postings": 10, "with_zip": 6},
    }
    write_json(os.path.join(OUT, "expected_counts.json"), {"counts": expected, "facts": facts})
    print(json.dumps(expected, indent=1))


if __name__ == "__main__":
    main()
