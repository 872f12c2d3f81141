#!/usr/bin/env python

import json
import sys
import typing as t

from cyclopts import App

import matchfair.reproduce as reproduce_

type Name = t.Literal["thm1", "thm2", "cor1", "cor1_complete", "one_sided"]

# Use a built-in formatter by name: {"default", "plain"}
app = App(help_formatter="default")


@app.default
def reproduce(
    *names: Name,
    json_output: bool = False,
) -> None:
    """Run the catalog reproductions and report each one.

    Exits nonzero if any reproduction with an expected verdict fails.

    Parameters
    ----------
    names
        Catalog entries to run.  Defaults to thm1, thm2 and cor1.
    json_output
        Print one JSON document per entry instead of a summary line.
    """
    failed = []

    for name in names or ("thm1", "thm2", "cor1"):
        run = reproduce_.reproduce(name)

        if json_output:
            print(json.dumps(run.to_json(), indent=2))
        else:
            print(f"{name}: {run.verdict.kind} ({'ok' if run.ok else 'FAILED'})")

        if not run.ok:
            failed.append(name)

    if failed:
        sys.exit(f"failed: {', '.join(failed)}")


if __name__ == "__main__":
    app()
