"""Driving an environment over the line-delimited JSON protocol.

The server isolates one environment per connection; observation frames
carry only agent-channel fields (never reward or info).  The same loop
works from any language that can speak TCP and JSON.
"""

import json

from langfeed.harness.protocol import ProtocolClient, ProtocolServer

with ProtocolServer() as server:
    print(f"server listening on {server.host}:{server.port}\n")
    with ProtocolClient(server.host, server.port) as client:
        reply = client.request(
            {"op": "make", "config": {"env_id": "gridworld", "seed": 4}}
        )
        print("make  ->", reply)
        frame = client.request({"op": "reset", "seed": 4})
        print("reset ->", json.dumps(frame)[:120], "...")
        for action in ["north", "east", "not-a-direction"]:
            frame = client.request({"op": "step", "action": action})
            print(f"step({action}) -> keys {sorted(frame)}")
            print("   feedback:", frame["feedback"].replace("\n", " | ")[:110])
            if frame["done"]:
                break
        print("close ->", client.request({"op": "close"}))
