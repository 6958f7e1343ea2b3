/**
 * Minimal agent loop: a random walker in the gridworld.
 *
 * Start a server first:  langfeed serve --listen tcp:127.0.0.1:8765
 * Then:                  npx ts-node example/random_walker.ts
 *
 * The loop is the whole architecture: observe the bundle, pick an action,
 * step, repeat until done. The reward never appears anywhere below.
 */

import { Client } from "../src/index";

const DIRECTIONS = ["north", "south", "east", "west"];

async function main(): Promise<void> {
  const endpoint = process.argv[2] ?? "127.0.0.1:8765";
  const client = await Client.connect(endpoint);
  const env = await client.make({ env_id: "gridworld", seed: 11 });

  let bundle = await env.reset(11);
  console.log("instruction:", bundle.instruction, "\n");

  for (let step = 1; ; step++) {
    const action = DIRECTIONS[Math.floor(Math.random() * DIRECTIONS.length)];
    const result = await env.step(action);
    bundle = result.bundle;
    console.log(`#${step} ${action}`);
    console.log("   ", bundle.feedback.split("\n").join("\n    "));
    if (result.done) {
      console.log(`\nepisode over (${result.terminated ? "terminated" : "truncated"})`);
      break;
    }
  }
  await client.close();
}

main().catch((err) => {
  console.error(err);
  process.exit(1);
});
