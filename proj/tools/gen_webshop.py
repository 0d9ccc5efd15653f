# Copyright 2026 The AFETM Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Generates data/webshop.json, the bundled desk-scale program model.

Structural functions call each other once per block. A function that rejects
its input fails silently and every caller bails out, so the request ends
where the fault sits. Corrupted data returned by a call is logged by the
caller with `log_warn`, or with `log_resource` for a utility.
Three hot utilities run in loops inside the leaves; they carry most of the
call weight, so a 10% budget traces every structural function and none of
the utilities.
"""

import argparse
import json
import pathlib

UTILITIES = ["u_alloc", "u_hash", "u_copy"]
LOGGERS = ["log_warn", "log_resource"]
LOOP_ITERATIONS = 24
PARAMS = 3  # request, context and options
RETURNS = 2  # status and payload

HANDLERS = {
    "browse": "handle_browse",
    "search": "handle_search",
    "cart": "handle_cart",
    "buy": "checkout",
    "login": "handle_login",
}

CALLS = {
    "parse_headers": [],
    "decode_body": ["parse_json"],
    "auth_session": ["session_lookup", "token_verify"],
    "write_response": ["compress", "socket_write"],
    "handle_browse": ["catalog_list", "render_page"],
    "handle_search": ["search_index", "rank_results", "render_page"],
    "handle_cart": ["cart_load", "cart_update", "price_quote"],
    "checkout": ["cart_load", "price_quote", "payment_charge",
                        "order_create", "send_email"],
    "handle_login": ["user_lookup", "password_check", "session_create"],
    "catalog_list": ["cache_get", "db_query"],
    "search_index": ["tokenize", "db_query"],
    "rank_results": ["score_items"],
    "render_page": ["template_load", "html_escape"],
    "cart_load": ["cache_get", "db_query"],
    "cart_update": ["db_write"],
    "price_quote": ["tax_compute", "discount_apply"],
    "payment_charge": ["fraud_check", "gateway_call"],
    "order_create": ["db_write", "inventory_reserve"],
    "send_email": ["template_load", "smtp_send"],
    "user_lookup": ["db_query"],
    "password_check": ["hash_verify"],
    "session_create": ["cache_put"],
    "session_lookup": ["cache_get"],
    "token_verify": ["hash_verify"],
}

LEAVES = ["parse_json", "db_query", "cache_get", "tokenize", "score_items",
          "template_load", "html_escape", "db_write", "tax_compute",
          "discount_apply", "fraud_check", "gateway_call", "inventory_reserve",
          "smtp_send", "hash_verify", "cache_put", "compress", "socket_write"]


class Blocks:
    """Blocks addressed by name; names resolve to labels in insertion order."""

    def __init__(self):
        self.blocks = []

    def add(self, name, calls=(), succ=(), on_error=None, on_failure=None,
            by_request=None):
        self.blocks.append((name, {
            "calls": list(calls), "succ": list(succ), "on_error": on_error,
            "on_failure": on_failure, "by_request": by_request or {}}))

    def checked_call(self, name, fn, nxt, bad, bail):
        """Calls fn; corrupted data leads to bad, a reported failure to bail."""
        self.add(name, [fn], [nxt, bad], bad, bail)

    def resolve(self):
        labels = {name: i for i, (name, _) in enumerate(self.blocks)}
        out = []
        for i, (_, b) in enumerate(self.blocks):
            r = {"label": i, "calls": b["calls"],
                 "succ": [labels[n] for n in b["succ"]]}
            if b["on_error"] is not None:
                r["on_error"] = labels[b["on_error"]]
            if b["on_failure"] is not None:
                r["on_failure"] = labels[b["on_failure"]]
            if b["by_request"]:
                r["by_request"] = {k: labels[v]
                                   for k, v in b["by_request"].items()}
            out.append(r)
        return out


def error_blocks(bl):
    bl.add("bad_call", ["log_warn"])
    bl.add("bad_resource", ["log_resource"])
    bl.add("bail")


def checked_function(fid, calls, loop):
    bl = Blocks()
    names = ["call%d" % i for i in range(len(calls))]
    after = names[1:] + ["loop" if loop else "end"]
    # Every function first copies its arguments, so a skipped first call
    # instruction stays invisible to tracing.
    # A rejected input fails silently.
    bl.add("entry", ["u_copy"], [names[0] if names else after[-1], "bail"],
           "bail")
    for name, fn, nxt in zip(names, calls, after):
        bad = "bad_resource" if fn in UTILITIES else "bad_call"
        bl.checked_call(name, fn, nxt, bad, "bail")
    if loop:
        bl.add("loop", UTILITIES,
               ["loop"] * LOOP_ITERATIONS + ["end", "bad_resource"],
               "bad_resource")
    bl.add("end")
    error_blocks(bl)
    return {"id": fid, "params": PARAMS, "returns": RETURNS,
            "blocks": bl.resolve()}


def read_request():
    # Utility calls interleave with structural calls, so the first call of
    # each utility sits at its own position in every request.
    order = ["parse_headers", "u_alloc", "decode_body", "u_hash", "auth_session"]
    return checked_function("read_request", order, loop=False)


def main_function():
    # main has no inputs to check; it only reacts to failed calls.
    bl = Blocks()
    bl.checked_call("read", "read_request", "dispatch", "err", "bail")
    bl.add("dispatch", [], list(HANDLERS.values()),
           by_request={r: h for r, h in HANDLERS.items()})
    for h in HANDLERS.values():
        bl.checked_call(h, h, "write", "err", "bail")
    bl.checked_call("write", "write_response", "finish", "err", "bail")
    bl.add("finish", ["finish_request"], ["end"])
    bl.add("end")
    bl.add("err", ["log_warn"])
    bl.add("bail")
    return {"id": "main", "params": 0, "returns": False,
            "blocks": bl.resolve()}


def build():
    functions = [main_function(), read_request()]
    for fid, callees in CALLS.items():
        functions.append(checked_function(fid, callees, loop=False))
    for fid in LEAVES:
        functions.append(checked_function(fid, [], loop=True))
    for u in UTILITIES:
        functions.append({"id": u, "params": 1, "blocks": [{"label": 0}]})
    functions.append({"id": "finish_request", "params": 0, "returns": False,
                      "blocks": [{"label": 0}]})
    for logger in LOGGERS:
        functions.append({"id": logger, "params": 0, "returns": False,
                          "blocks": [{"label": 0}]})
    return {
        "entry": "main",
        "seed": 20260101,
        "variants": 4,
        "max_depth": 32,
        "max_block_steps": 512,
        "loggers": LOGGERS,
        "workloads": [{
            "id": "shop",
            "rate": 20.0,
            "mix": {"browse": 4, "search": 3, "cart": 2, "buy": 1,
                    "login": 1},
        }],
        "functions": functions,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=pathlib.Path,
                    default=pathlib.Path(__file__).resolve().parent.parent /
                    "data" / "webshop.json")
    args = ap.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(build(), indent=2) + "\n")


if __name__ == "__main__":
    main()
