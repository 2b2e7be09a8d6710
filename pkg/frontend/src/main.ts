// Browser entry point: the console talks to the service at the base address
// given by ?service=... (defaults to same origin).

import { ApiClient } from "./api.js";
import { bootstrap } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "";
const app = bootstrap(document, new ApiClient(baseUrl));
void app.refreshOod();
