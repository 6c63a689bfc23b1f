"""Collects acceptance verdicts and prints one line per criterion at the end."""

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        verdict, title, detail = ACCEPTANCE[number]
        line = f"criterion {number:2d} {verdict}: {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
