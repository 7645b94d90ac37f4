"""Bundled fixture graphs and a small university-benchmark style generator."""

from __future__ import annotations

import random
from importlib import resources
from pathlib import Path

from .query import BGPQuery, parse_query
from .rdf import (SUBCLASSOF, SUBPROPERTYOF, TYPE, DOMAIN, Graph, Iri, Literal, Triple,
                  build_graph, compute_closure, parse_ntriples)

EX = "http://example.org/kg/"
DBO = "http://dbpedia.org/ontology/"
DBR = "http://dbpedia.org/resource/"
UB = "http://swat.cse.lehigh.edu/onto/univ-bench.owl#"

FIXTURES = ("directors", "scorsese", "coppola")


def data_path(name: str) -> Path:
    """Path of a bundled file such as ``"directors.nt"`` or ``"director.rq"``."""
    return Path(str(resources.files("kgreform") / "data" / name))


def load_fixture(name: str, closure: bool = True) -> Graph:
    with open(data_path(f"{name}.nt"), encoding="utf-8") as fh:
        g = build_graph(parse_ntriples(fh))
    return compute_closure(g) if closure else g


def load_query(name: str) -> BGPQuery:
    return parse_query(data_path(f"{name}.rq").read_text(encoding="utf-8"))


# --------------------------------------------------------------------------
# University benchmark look-alike
# --------------------------------------------------------------------------

_CLASS_TREE = {
    "FullProfessor": "Professor",
    "AssociateProfessor": "Professor",
    "AssistantProfessor": "Professor",
    "VisitingProfessor": "Professor",
    "Professor": "Faculty",
    "Lecturer": "Faculty",
    "Faculty": "Employee",
    "Employee": "Person",
    "GraduateStudent": "Student",
    "UndergraduateStudent": "Student",
    "Student": "Person",
    "GraduateCourse": "Course",
    "Course": "Work",
    "Department": "Organization",
    "University": "Organization",
    "ResearchGroup": "Organization",
}

_PROPERTY_TREE = {
    "headOf": "worksFor",
    "worksFor": "memberOf",
    "doctoralDegreeFrom": "degreeFrom",
    "mastersDegreeFrom": "degreeFrom",
    "undergraduateDegreeFrom": "degreeFrom",
}

_DOMAINS = {"worksFor": "Employee", "teacherOf": "Faculty", "takesCourse": "Student",
            "advisor": "Person", "researchInterest": "Faculty"}

#: the department that has no full professor; queries about it fail
EMPTY_DEPARTMENT = "Department4"


def ub(local: str) -> Iri:
    return Iri(UB + local)


def university(u: int) -> Iri:
    return Iri(f"http://www.University{u}.edu")


def department(u: int, d: int | str) -> Iri:
    name = d if isinstance(d, str) else f"Department{d}"
    return Iri(f"http://www.{name}.University{u}.edu")


def member(u: int, d: int | str, local: str) -> Iri:
    return Iri(f"{department(u, d).value}/{local}")


def lubm_like(universities: int = 4, departments: int = 4, seed: int = 0) -> list[Triple]:
    """Triples shaped like the Lehigh University Benchmark, at desk scale.

    Every university gets ``departments`` regular departments plus
    :data:`EMPTY_DEPARTMENT`, which has lecturers and students but no full
    professor.  The default size is about 2,000 triples.
    """
    rng = random.Random(seed)
    out: list[Triple] = []

    def add(s, p, o):
        out.append(Triple(s, p, o))

    for sub, sup in _CLASS_TREE.items():
        add(ub(sub), SUBCLASSOF, ub(sup))
    for sub, sup in _PROPERTY_TREE.items():
        add(ub(sub), SUBPROPERTYOF, ub(sup))
    for prop, cls in _DOMAINS.items():
        add(ub(prop), DOMAIN, ub(cls))

    unis = [university(u) for u in range(universities)]
    for u, uni in enumerate(unis):
        add(uni, TYPE, ub("University"))
        add(uni, ub("name"), Literal(f"University{u}"))

    interests = [f"Research{i}" for i in range(30)]

    def person(node, cls, dept, name, works=True):
        add(node, TYPE, ub(cls))
        add(node, ub("worksFor" if works else "memberOf"), dept)
        add(node, ub("name"), Literal(name))
        add(node, ub("emailAddress"), Literal(f"{name}@{dept.value[11:]}"))

    for u in range(universities):
        dept_names: list[int | str] = list(range(departments)) + [EMPTY_DEPARTMENT]
        for d in dept_names:
            dept = department(u, d)
            label = d if isinstance(d, str) else f"Department{d}"
            add(dept, TYPE, ub("Department"))
            add(dept, ub("name"), Literal(label))
            add(dept, ub("subOrganizationOf"), university(u))
            regular = not isinstance(d, str)

            courses = [member(u, d, f"Course{i}") for i in range(3 if regular else 2)]
            grad_courses = [member(u, d, f"GraduateCourse{i}") for i in range(2 if regular else 1)]
            for c in courses:
                add(c, TYPE, ub("Course"))
                add(c, ub("name"), Literal(c.value.rsplit("/", 1)[1]))
            for c in grad_courses:
                add(c, TYPE, ub("GraduateCourse"))
                add(c, ub("name"), Literal(c.value.rsplit("/", 1)[1]))
            all_courses = courses + grad_courses

            staff = []
            if regular:
                staff += [("FullProfessor", i) for i in range(2)]
                staff += [("AssociateProfessor", i) for i in range(2)]
                staff += [("AssistantProfessor", i) for i in range(1)]
            staff += [("Lecturer", i) for i in range(1 if regular else 2)]
            faculty = []
            for cls, i in staff:
                node = member(u, d, f"{cls}{i}")
                faculty.append(node)
                person(node, cls, dept, f"{cls}{i}")
                add(node, ub("telephone"), Literal(f"{rng.randrange(10**6):06d}"))
                add(node, ub("researchInterest"), Literal(rng.choice(interests)))
                if cls != "Lecturer":
                    add(node, ub("doctoralDegreeFrom"), rng.choice(unis))
                add(node, ub("undergraduateDegreeFrom"), rng.choice(unis))
                add(node, ub("teacherOf"), rng.choice(all_courses))
            if regular:
                add(member(u, d, "FullProfessor0"), ub("headOf"), dept)

            group = member(u, d, "ResearchGroup0")
            add(group, TYPE, ub("ResearchGroup"))
            add(group, ub("subOrganizationOf"), dept)

            advisors = [f for f in faculty if "Professor" in f.value] or faculty
            for i in range(3 if regular else 2):
                node = member(u, d, f"GraduateStudent{i}")
                person(node, "GraduateStudent", dept, f"GraduateStudent{i}", works=False)
                add(node, ub("advisor"), rng.choice(advisors))
                add(node, ub("undergraduateDegreeFrom"), rng.choice(unis))
                add(node, ub("takesCourse"), rng.choice(grad_courses))
            for i in range(4 if regular else 2):
                node = member(u, d, f"UndergraduateStudent{i}")
                person(node, "UndergraduateStudent", dept, f"UndergraduateStudent{i}", works=False)
                for c in rng.sample(courses, 2):
                    add(node, ub("takesCourse"), c)
    return out


def lubm_failing_query(u: int = 0) -> BGPQuery:
    """Full professors working for the department that has none."""
    return parse_query(
        f"PREFIX ub: <{UB}>\n"
        f"SELECT ?X WHERE {{ ?X a ub:FullProfessor . ?X ub:worksFor <{department(u, EMPTY_DEPARTMENT).value}> }}"
    )
