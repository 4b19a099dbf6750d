#!/usr/bin/env python3
"""Builds the fixture corpus: corpus/<case>/{fixture,transcript,assertions}.json.

All values are synthetic and drawn from a seeded RNG. Expected results are
computed here in plain Python, independently of the C++ engine, and written
into the assertions. Re-running the script reproduces the committed files.

Medal icons are <img> tags whose alt text is G, S or B; the HTML parser reads
alt text, so a medal cell reads "G 2 S 0 B 1".
"""

import html
import json
import random
import re
import sys
from decimal import ROUND_HALF_UP, Decimal, getcontext
from pathlib import Path

getcontext().prec = 60
ROOT = Path(__file__).resolve().parent

# --- small builders ---------------------------------------------------------------------


def source(app, title, pid=4100):
    return {"app_name": app, "process_id": pid, "window_title": title}


def fixture(app, title, payloads):
    return {
        "source": source(app, title),
        "payloads": [{"kind": k, "data": d, "encoding": "utf8"} for k, d in payloads],
    }


def call(i, tool, args):
    return {"id": f"c{i}", "tool": tool, "args": args}


def respond(*calls):
    return {"tool_calls": list(calls)}


def done(text="Pasted."):
    return {"text": text}


def extract():
    return respond(call(1, "add_structured_data", {"format": "auto"}))


def render_call(i, key, fmt, source_key=None, styles=True):
    spec = {"fmt": fmt}
    if source_key:
        spec["source_key"] = source_key
    if not styles:
        spec["opts"] = {"styles": False}
    return call(i, "add_transformation", {"key": key, "render": spec})


def paste_call(i, key, content_type="text"):
    return call(i, "paste_to_destination", {"key": key, "content_type": content_type})


def plan_call(i, key, plan):
    return call(i, "add_transformation", {"key": key, "plan": plan})


def dest(app, title):
    return {"app_name": app, "process_id": 5200, "window_title": title}


def ok_checks(content_type="text"):
    return [
        {"check": "outcome", "equals": "pasted"},
        {"check": "retries_used", "equals": 0},
        {"check": "route", "equals": "direct"},
        {"check": "content_type", "equals": content_type},
    ]


# --- html / markdown / delimited writers (fixture side) ---------------------------------


def td(text, bg=None, raw=False):
    style = f' style="background-color:{bg}"' if bg else ""
    body = text if raw else html.escape(text)
    return f"<td{style}>{body}</td>"


def html_table(headers, rows, caption=None):
    """rows: list of lists of (text, bg, raw) or plain str."""
    out = ["<table>"]
    if caption:
        out.append(f"<caption>{html.escape(caption)}</caption>")
    out.append("<thead><tr>" + "".join(f"<th>{html.escape(h)}</th>" for h in headers) + "</tr></thead>")
    out.append("<tbody>")
    for row in rows:
        cells = []
        for c in row:
            if isinstance(c, str):
                cells.append(td(c))
            else:
                cells.append(td(*c))
        out.append("<tr>" + "".join(cells) + "</tr>")
    out.append("</tbody></table>")
    return "\n".join(out)


def html_page(title, tables):
    return "<html><head><meta charset=\"utf-8\"><title>%s</title></head><body>\n%s\n</body></html>" % (
        html.escape(title),
        "\n<p>Source: synthetic sample.</p>\n".join(tables),
    )


def markdown(headers, rows):
    lines = ["| " + " | ".join(headers) + " |", "|" + "|".join(" --- " for _ in headers) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def delimited(headers, rows, sep):
    def field(s):
        if sep == "," and any(ch in s for ch in ',"\n'):
            return '"' + s.replace('"', '""') + '"'
        return s

    return "\n".join(sep.join(field(c) for c in r) for r in [headers] + rows) + "\n"


# --- oracle helpers ---------------------------------------------------------------------


def num(s):
    """Numeric value of a cell as the engine reads it: plain decimal, optional %."""
    m = re.fullmatch(r"(-?\d+(?:\.\d+)?)%?", s.strip())
    return Decimal(m.group(1)) if m else None


def dec_text(d):
    """Engine rendering of an exact decimal (scale kept as computed)."""
    s = format(d, "f")
    return "0" if s in ("-0", "0") else s


def round2(d):
    q = d.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    # Stay away from half-way points so 16-digit division can never disagree.
    third = (d * 1000) % 10
    assert third != 5 or (d * 1000) != (d * 1000).to_integral_value(), "borderline rounding"
    return dec_text(q)


def color_counts(rows_bg):
    counts = {}
    for bg in rows_bg:
        if bg:
            counts[bg] = counts.get(bg, 0) + 1
    return counts


# --- datasets ---------------------------------------------------------------------------

POLLSTERS = ["Northfield", "Harbor Analytics", "Meridian", "Keystone Research", "Bluewater",
             "Civic Pulse", "Lakeside Univ.", "Summit Data", "Granite Polling", "Redwood Group"]
MONTHS = ["Sep", "Oct"]

DEM = ["#BBDEFB", "#64B5F6", "#1E88E5"]  # lean, likely, safe
REP = ["#FFCDD2", "#E57373", "#E53935"]


def shade(margin):
    return 0 if margin < 2 else (1 if margin <= 5 else 2)


def poll_rows(rng, n):
    rows = []
    for _ in range(n):
        day = rng.randint(1, 28)
        dates = f"{rng.choice(MONTHS)} {day}-{min(day + rng.randint(1, 3), 30)}"
        sample = f"{rng.randint(1, 3)},{rng.randint(100, 999)} {rng.choice(['LV', 'RV'])}"
        d = rng.randint(40, 54)
        r = rng.randint(40, 54)
        rows.append([dates, rng.choice(POLLSTERS), sample, f"{d}%", f"{r}%"])
    return rows


def ballot_colors(row):
    d, r = num(row[3]), num(row[4])
    if d == r:
        return [None] * 5
    if d > r:
        return [None, None, None, DEM[shade(d - r)], None]
    return [None, None, None, None, REP[shade(r - d)]]


def ballot():
    rng = random.Random(11)
    headers = ["Dates", "Pollster", "Sample", "Dem", "Rep"]
    a, b = poll_rows(rng, 7), poll_rows(rng, 6)
    a[2][4] = a[2][3]  # one tie: uncolored
    tables = []
    for caption, rows in (("Generic ballot, likely voters", a), ("Generic ballot, registered voters", b)):
        cells = [[(v, bg) for v, bg in zip(r, ballot_colors(r))] for r in rows]
        tables.append(html_table(headers, cells, caption))
    page = html_page("Generic ballot polls", tables)
    text = delimited(headers, a, "\t") + "\n" + delimited(headers, b, "\t")
    rows = a + b
    colors = [ballot_colors(r) for r in rows]
    return headers, rows, colors, fixture("sim:chrome", "Generic ballot polls - Chrome", [("html", page), ("text", text)])


def election():
    rng = random.Random(23)
    headers = ["Dates", "Pollster", "Sample", "Harris", "Trump", "Net result"]
    rows, colors = [], []
    for _ in range(12):
        day = rng.randint(1, 27)
        h, t = rng.randint(42, 53), rng.randint(42, 53)
        if len(rows) == 4:
            t = h
        net = "Tie" if h == t else (f"Harris +{h - t}" if h > t else f"Trump +{t - h}")
        rows.append([f"Oct {day}-{day + 1}", rng.choice(POLLSTERS), f"{rng.randint(600, 2400)} LV", f"{h}%", f"{t}%", net])
        bg = None if h == t else (DEM[shade(h - t)] if h > t else REP[shade(t - h)])
        colors.append([None] * 5 + [bg])
    cells = [[(v, bg) for v, bg in zip(r, c)] for r, c in zip(rows, colors)]
    page = html_page("National polls", [html_table(headers, cells)])
    return headers, rows, colors, fixture("sim:chrome", "2024 national polls - Chrome", [("html", page), ("text", delimited(headers, rows, "\t"))])


ATHLETES = ["Ana Duarte", "Mei Takahashi", "Lukas Brandt", "Sofia Marin", "Kwame Mensah", "Elin Berg",
            "Tomas Novak", "Priya Raman", "Jonah Reyes", "Ines Carvalho", "Oskar Lind", "Hana Sato"]
EVENTS = ["Swimming", "Athletics", "Cycling", "Gymnastics", "Rowing", "Fencing"]


def medal_html(g, s, b):
    return "".join(f'<div><img src="{k.lower()}.png" alt="{k}"> {n}</div>' for k, n in (("G", g), ("S", s), ("B", b)))


def olympics():
    rng = random.Random(37)
    headers = ["Athlete", "Gender", "Events", "Medals"]
    rows, counts, cells = [], [], []
    for i, name in enumerate(ATHLETES):
        g, s, b = rng.randint(0, 3), rng.randint(0, 2), rng.randint(0, 2)
        if i in (1, 5):
            g = 0
        if g + s + b == 0:
            b = 1
        gender = rng.choice(["F", "M"])
        event = rng.choice(EVENTS)
        counts.append((g, s, b))
        rows.append([name, gender, event, f"G {g} S {s} B {b}"])
        cells.append([name, gender, event, (medal_html(g, s, b), None, True)])
    page = html_page("Multi-medalists", [html_table(headers, cells)])
    return headers, rows, counts, fixture("sim:chrome", "Multiple medalists - Chrome", [("html", page)])


# --- case assembly ----------------------------------------------------------------------


def write_case(name, description, fix, jobs_scripts, jobs):
    d = ROOT / name
    d.mkdir(parents=True, exist_ok=True)
    (d / "fixture.json").write_text(json.dumps(fix, indent=2, ensure_ascii=False) + "\n")
    transcript = {"jobs": [{"responses": s} for s in jobs_scripts]}
    (d / "transcript.json").write_text(json.dumps(transcript, indent=2, ensure_ascii=False) + "\n")
    (d / "assertions.json").write_text(
        json.dumps({"description": description, "jobs": jobs}, indent=2, ensure_ascii=False) + "\n")


def simple_job(plan, fmt, content_type="text", structured=True):
    """extract -> [plan t1] -> render out -> paste."""
    script = [extract()] if structured else []
    step = []
    if plan is not None:
        step.append(plan_call(2, "t1", plan))
    step.append(render_call(3, "out", fmt, "t1" if plan is not None else None))
    script.append(respond(*step))
    script.append(respond(paste_call(4, "out", content_type)))
    script.append(done())
    return script


def parses(fmt, headers, rows):
    return {"check": "content_parses", "format": fmt, "headers": headers, "rows": rows}


def build_ballot():
    headers, rows, colors, fix = ballot()
    all_bg = [c for r in colors for c in r]
    counts = color_counts(all_bg)

    write_case("ballot-task-1", "Ballot polls: copy without transformation into a LaTeX editor.", fix,
               [simple_job("merge_tables", "latex_tabular")],
               [{"dest": dest("sim:overleaf", "paper.tex - Overleaf"),
                 "instruction": "Copy the table without any transformations.",
                 "checks": ok_checks() + [
                     {"check": "table", "key": "t1", "columns": 5, "row_count": len(rows), "headers": headers, "rows": rows},
                     parses("latex_tabular", headers, rows),
                     {"check": "content_contains", "text": "\\cellcolor[HTML]", "count": sum(counts.values())},
                     {"check": "color_counts", "counts": {k.lstrip("#"): v for k, v in counts.items()}},
                 ]}])

    kept = [r[:3] for r in rows]
    write_case("ballot-task-2", "Ballot polls: drop the fourth and fifth columns, paste as markdown.", fix,
               [simple_job("merge_tables\ndrop_cols [4, 5]", "markdown_table")],
               [{"dest": dest("sim:markdown", "notes.md - Typora"),
                 "instruction": "Paste the table without the fourth and fifth columns.",
                 "checks": ok_checks() + [
                     {"check": "table", "key": "t1", "columns": 3, "headers": headers[:3], "rows": kept},
                     parses("markdown_table", headers[:3], kept),
                 ]}])

    merged_headers = ["Pollster Sample" if h == "Pollster" else h for h in headers if h != "Sample"]
    merged = [[r[0], r[1] + " " + r[2], r[3], r[4]] for r in rows]
    styled = [[i, c - 1] for i, row in enumerate(colors) for c, bg in enumerate(row) if bg]
    write_case("ballot-task-3", "Ballot polls: merge the second and third columns, paste into a spreadsheet as html.", fix,
               [simple_job("merge_tables\nmerge_cols 2 3", "html_table", "html")],
               [{"dest": dest("sim:excel", "Book1 - Excel"),
                 "instruction": "Paste the table and merge the second and third columns.",
                 "checks": ok_checks("html") + [
                     {"check": "table", "key": "t1", "columns": 4, "headers": merged_headers, "rows": merged},
                     {"check": "styled_cells", "key": "t1", "property": "bg_color", "cells": styled},
                     parses("html_table", merged_headers, merged),
                     {"check": "color_counts", "counts": counts},
                 ]}])


def build_election():
    headers, rows, colors, fix = election()
    write_case("election-task-1", "Presidential polls: copy without transformation into markdown.", fix,
               [simple_job(None, "markdown_table")],
               [{"dest": dest("sim:markdown", "notes.md - Typora"),
                 "instruction": "Copy the table without any transformations.",
                 "checks": ok_checks() + [parses("markdown_table", headers, rows)]}])

    kept = [r[:4] for r in rows]
    write_case("election-task-2", "Presidential polls: drop the last two columns, paste into LaTeX.", fix,
               [simple_job("drop_cols [5, 6]", "latex_tabular")],
               [{"dest": dest("sim:overleaf", "paper.tex - Overleaf"),
                 "instruction": "Paste the table without the last two columns.",
                 "checks": ok_checks() + [
                     {"check": "table", "key": "t1", "columns": 4, "headers": headers[:4], "rows": kept},
                     parses("latex_tabular", headers[:4], kept),
                     {"check": "content_absent", "text": "\\cellcolor"},
                 ]}])

    diff_rows = [r + [dec_text(num(r[3]) - num(r[4]))] for r in rows]
    write_case("election-task-3", "Presidential polls: add the polling difference, paste into a spreadsheet as text.", fix,
               [simple_job('derive "Difference" = col("Harris") - col("Trump")', "tsv")],
               [{"dest": dest("sim:excel", "Book1 - Excel"),
                 "instruction": "Add a column to show the difference in the polling percentage.",
                 "checks": ok_checks() + [
                     {"check": "table", "key": "t1", "columns": 7, "headers": headers + ["Difference"], "rows": diff_rows},
                     parses("tsv", headers + ["Difference"], diff_rows),
                 ]}])


def build_olympics():
    headers, rows, counts, fix = olympics()
    write_case("olympics-task-1", "Olympic medals: copy without transformation into LaTeX.", fix,
               [simple_job(None, "latex_tabular")],
               [{"dest": dest("sim:overleaf", "paper.tex - Overleaf"),
                 "instruction": "Copy the table without any transformations.",
                 "checks": ok_checks() + [parses("latex_tabular", headers, rows)]}])

    split_headers = headers[:3] + ["Gold", "Silver", "Bronze"]
    split_rows = [r[:3] + [str(g), str(s), str(b)] for r, (g, s, b) in zip(rows, counts)]
    plan = 'split_col "Medals" regex="^G (\\d+) S (\\d+) B (\\d+)$" into=["Gold", "Silver", "Bronze"]'
    write_case("olympics-task-2", "Olympic medals: split Medals by type, paste as markdown.", fix,
               [simple_job(plan, "markdown_table")],
               [{"dest": dest("sim:markdown", "notes.md - Typora"),
                 "instruction": 'Split the "Medals" column into three by medal type.',
                 "checks": ok_checks() + [
                     {"check": "table", "key": "t1", "columns": len(headers) + 2, "headers": split_headers, "rows": split_rows},
                     parses("markdown_table", split_headers, split_rows),
                 ]}])

    gold_rows = [i for i, (g, _, _) in enumerate(counts) if g >= 1]
    plan = 'style rows where to_number(regex_extract(col("Medals"), "G (\\d+)")) >= 1 with bg=#FFFF00'
    write_case("olympics-task-3", "Olympic medals: highlight athletes with a gold medal, paste into a spreadsheet as html.", fix,
               [simple_job(plan, "html_table", "html")],
               [{"dest": dest("sim:excel", "Book1 - Excel"),
                 "instruction": "Highlight athletes with at least one gold medal.",
                 "checks": ok_checks("html") + [
                     {"check": "table", "key": "t1", "rows": rows},
                     {"check": "styled_rows", "key": "t1", "property": "bg_color", "value": "#FFFF00", "rows": gold_rows},
                     {"check": "content_contains", "text": "#FFFF00", "count": len(gold_rows) * len(headers)},
                 ]}])


# --- scenarios --------------------------------------------------------------------------


def scenario_1():
    rng = random.Random(101)
    headers = ["Participant", "Condition", "Task", "Time (s)", "Errors"]
    rows = []
    for p in range(1, 9):
        for cond in ("Baseline", "Tool"):
            rows.append([f"P{p}", cond, rng.choice(["T1", "T2", "T3"]), f"{rng.randint(40, 240)}.{rng.randint(0, 9)}",
                         str(rng.randint(0, 4))])
    page = html_page("Book1", [html_table(headers, rows)])
    fix = fixture("sim:excel", "study.xlsx - Excel", [("text", delimited(headers, rows, "\t")), ("html", page)])
    script = [
        extract(),
        respond(plan_call(2, "data", "keep_cols [1..5]"), call(3, "write_temp_file", {"key": "data", "ext": "csv"})),
        respond(call(4, "add_transformation", {"key": "code", "loader": {"source_key": "data", "target": "notebook_dataframe"}})),
        respond(paste_call(5, "code")),
        done(),
    ]
    write_case("scenario-1-excel-to-notebook", "Excel data pasted into a notebook as code that loads a temp csv.", fix, [script],
               [{"dest": dest("sim:jupyter", "analysis.ipynb - Jupyter"),
                 "checks": ok_checks() + [
                     {"check": "temp_csv", "headers": headers, "rows": rows},
                     {"check": "content_contains", "text": "import pandas as pd"},
                     {"check": "content_contains", "text": "df = pd.read_csv(", "count": 1},
                 ]}])


def scenario_2():
    rng = random.Random(202)
    headers = ["Region", "Population", "No. of cases"]
    regions = ["Northvale", "Eastmoor", "Southbridge", "Westfield", "Highland", "Riverside", "Lakeshore", "Pinecrest"]
    rows = [[r, str(rng.randint(20000, 900000)), str(rng.randint(50, 9000))] for r in regions]
    fix = fixture("sim:markdown", "outbreak.md - Typora", [("text", markdown(headers, rows))])
    derived = []
    for r in rows:
        rate = Decimal(r[2]) / Decimal(r[1]) * 1000
        derived.append(r + [round2(rate)])
    derived.sort(key=lambda r: Decimal(r[3]), reverse=True)
    assert len({r[3] for r in derived}) == len(derived), "ties would make the order ambiguous"
    new_headers = headers + ["Cases per 1,000 people"]
    plan = ('derive "Cases per 1,000 people" = round(col("No. of cases") / col("Population") * 1000, 2)\n'
            'sort "Cases per 1,000 people" desc')
    write_case("scenario-2-markdown-derive-sort", "Markdown table gains a derived rate column, sorted descending.", fix,
               [simple_job(plan, "markdown_table")],
               [{"dest": dest("sim:markdown", "blog-post.md - Typora"),
                 "instruction": "Add a column with cases per 1,000 people and sort by it in descending order",
                 "checks": ok_checks() + [
                     {"check": "table", "key": "t1", "headers": new_headers, "rows": derived},
                     parses("markdown_table", new_headers, derived),
                 ]}])


def scenario_3():
    rng = random.Random(303)
    headers = ["Method", "Precision", "Recall", "F1"]
    palette = ["#C6EFCE", "#FFEB9C", "#FFC7CE"]
    rows, cells, bgs = [], [], []
    for m in ["Rule-based", "CRF", "BiLSTM", "Fine-tuned", "Prompted", "Ensemble"]:
        vals = [f"0.{rng.randint(60, 97)}" for _ in range(3)]
        colors = [None] + [palette[0] if float(v) >= 0.9 else (palette[1] if float(v) >= 0.75 else palette[2]) for v in vals]
        rows.append([m] + vals)
        cells.append([(v, bg) for v, bg in zip([m] + vals, colors)])
        bgs += colors
    page = html_page("Slide 4", [html_table(headers, cells)])
    fix = fixture("sim:powerpoint", "results.pptx - PowerPoint", [("html", page), ("text", delimited(headers, rows, "\t"))])
    counts = color_counts(bgs)
    first = [extract(), respond(render_call(2, "out", "html_table", styles=False)), respond(paste_call(3, "out", "html")), done()]
    second = [respond(render_call(1, "styled", "html_table")), respond(paste_call(2, "styled", "html")), done()]
    html_dest = dest("sim:html-editor", "report.html - Editor")
    write_case("scenario-3-preserve-colors", "PowerPoint table pasted as html; a re-trigger asks to keep the cell colors.", fix,
               [first, second],
               [{"dest": html_dest,
                 "checks": ok_checks("html") + [
                     parses("html_table", headers, rows),
                     {"check": "content_absent", "text": "background-color"},
                 ]},
                {"dest": html_dest,
                 "instruction": "preserve the table colors",
                 "checks": ok_checks("html") + [
                     {"check": "same_context_as_previous"},
                     parses("html_table", headers, rows),
                     {"check": "color_counts", "counts": counts},
                     {"check": "content_contains", "text": "background-color", "count": sum(counts.values())},
                 ]}])


def scenario_4():
    rng = random.Random(404)
    headers = ["Student", "Assignment", "Score"]
    students = ["Avery", "Blake", "Casey", "Devon", "Emery", "Finley"]
    assignments = ["HW1", "HW2", "HW3", "Quiz"]
    rows = []
    for a in assignments:  # long format, sorted by assignment
        for s in students:
            if (a, s) == ("HW3", "Devon"):
                continue  # one missing submission
            rows.append([s, a, str(rng.randint(55, 100))])
    fix = fixture("sim:obsidian", "grades.md - Obsidian", [("text", markdown(headers, rows))])

    # Naive nested-loop grouping.
    ids, names = [], []
    for r in rows:
        if r[0] not in ids:
            ids.append(r[0])
        if r[1] not in names:
            names.append(r[1])
    wide = []
    for i in ids:
        line = [i]
        for n in names:
            hit = [r[2] for r in rows if r[0] == i and r[1] == n]
            line.append(hit[0] if hit else "")
        wide.append(line)
    wide_headers = ["Student"] + names
    write_case("scenario-4-pivot-wider", "Long-format markdown grades pivoted to wide format.", fix,
               [simple_job("pivot_wider id=1 names=2 values=3", "markdown_table")],
               [{"dest": dest("sim:obsidian", "grades.md - Obsidian"),
                 "instruction": "Pivot the table from long to wide format",
                 "checks": ok_checks() + [
                     {"check": "table", "key": "t1", "headers": wide_headers, "rows": wide},
                     parses("markdown_table", wide_headers, wide),
                 ]}])


def scenario_5():
    rng = random.Random(505)
    headers = ["Benchmark", "Model A", "Model B", "Model C", "Model D"]
    rows = []
    for b in ["MMLU", "GSM8K", "HellaSwag", "ARC-C", "TruthfulQA", "Winogrande", "BoolQ"]:
        rows.append([b] + [f"0.{rng.randint(55, 95)}" for _ in range(4)])
    rows[3][2] = rows[3][4] = "0.97"  # a tie: both maxima are bolded
    fix = fixture("sim:vscode", "results.csv - Visual Studio Code", [("text", delimited(headers, rows, ","))])
    bold = []
    for i, r in enumerate(rows):
        best = max(Decimal(v) for v in r[1:])
        bold += [[i, c] for c in range(1, 5) if Decimal(r[c]) == best]
    plan = "style cells [2..5] where cell = rowmax([2..5]) with bold"
    write_case("scenario-5-bold-row-max", "Benchmark csv pasted into LaTeX with each row's best score in bold.", fix,
               [simple_job(plan, "latex_tabular")],
               [{"dest": dest("sim:overleaf", "paper.tex - Overleaf"),
                 "instruction": "bold the highest accuracy values in each row",
                 "checks": ok_checks() + [
                     {"check": "styled_cells", "key": "t1", "property": "bold", "cells": bold},
                     {"check": "content_contains", "text": "\\textbf{", "count": len(bold)},
                     parses("latex_tabular", headers, rows),
                 ]}])


def main():
    build_ballot()
    build_election()
    build_olympics()
    scenario_1()
    scenario_2()
    scenario_3()
    scenario_4()
    scenario_5()
    return 0


if __name__ == "__main__":
    sys.exit(main())
